"""File formats: instance/QUBO JSON, energy CSV, sweep CSV, reports and run manifests.

All writers are deterministic (fixed key order, ``repr`` floats) so repeated
runs with the same parameters produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cumulants import EnergySample
from .ising import IsingInstance, QuboInstance, qubo_to_ising

FORMAT_VERSIONS = {"instance": 1, "energies": 1, "report": 1, "sweep": 1}
ENERGY_HEADER = "energy"
SWEEP_COLUMNS = ("beta_mh", "eta", "beta_estimated", "e0_estimated", "e0_error", "delta_beta", "e0_true")


class FormatError(ValueError):
    """Input file does not follow the expected layout."""


def spins_json(config) -> list[int]:
    return [int(v) for v in config]


def file_hash(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _clean(obj):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_json(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def instance_to_dict(instance: IsingInstance) -> dict:
    return {
        "num_spins": instance.num_spins,
        "couplings": [[i, j, v] for (i, j), v in instance.couplings.items()],
        "fields": [[i, v] for i, v in instance.fields.items()],
    }


def instance_from_dict(data: dict) -> IsingInstance:
    try:
        return IsingInstance.from_lists(data["num_spins"], data.get("couplings", []), data.get("fields", []))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed instance: {exc!r}") from exc


def qubo_to_dict(qubo: QuboInstance) -> dict:
    u = qubo.matrix
    entries = [[i, j, float(u[i, j])] for i in range(qubo.dimension) for j in range(i, qubo.dimension) if u[i, j] != 0]
    return {"dimension": qubo.dimension, "entries": entries}


def qubo_from_dict(data: dict) -> QuboInstance:
    try:
        return QuboInstance.from_entries(data["dimension"], data.get("entries", []))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed QUBO: {exc!r}") from exc


def load_problem(path) -> tuple[IsingInstance, float, str]:
    """Read an instance or QUBO JSON file; returns ``(instance, offset, kind)``.

    QUBO files (keys ``dimension``/``entries``) are converted, with ``offset`` the
    constant to add to Ising energies to recover QUBO values.
    """
    data = read_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if "dimension" in data:
        instance, offset = qubo_to_ising(qubo_from_dict(data))
        return instance, offset, "qubo"
    return instance_from_dict(data), 0.0, "ising"


def write_instance(path, instance: IsingInstance) -> None:
    write_json(path, instance_to_dict(instance))


def format_energies(sample: EnergySample) -> str:
    buf = [ENERGY_HEADER]
    buf.extend(repr(float(e)) for e in sample.energies)
    return "\n".join(buf) + "\n"


def write_energies(path, sample: EnergySample) -> None:
    Path(path).write_text(format_energies(sample))


def parse_energies(text: str, source="<energies>") -> EnergySample:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",")[0].strip() != ENERGY_HEADER:
        raise FormatError(f"{source}: expected header {ENERGY_HEADER!r}")
    values = []
    for k, ln in enumerate(lines[1:], start=2):
        try:
            values.append(float(ln.split(",")[0]))
        except ValueError as exc:
            raise FormatError(f"{source}:{k}: not a number: {ln!r}") from exc
    if not values:
        raise FormatError(f"{source}: no energies")
    return EnergySample(np.array(values))


def read_energies(path) -> EnergySample:
    return parse_energies(Path(path).read_text(), source=str(path))


def _cell(value) -> str:
    if value is None:
        return "nan"
    return repr(float(value))


def format_sweep(rows: list[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in SWEEP_COLUMNS])
    return out.getvalue()


def parse_sweep(text: str, source="<sweep>") -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "beta_mh" not in reader.fieldnames or "eta" not in reader.fieldnames:
        raise FormatError(f"{source}: sweep CSV needs at least beta_mh and eta columns")
    rows = []
    for k, raw in enumerate(reader, start=2):
        try:
            rows.append({c: float(v) for c, v in raw.items() if c is not None and v not in (None, "")})
        except ValueError as exc:
            raise FormatError(f"{source}:{k}: {exc}") from exc
    return rows


def read_sweep(path) -> list[dict]:
    return parse_sweep(Path(path).read_text(), source=str(path))


@dataclass
class RunManifest:
    """Everything needed to replay a command: resolved parameters, argv, input hashes."""

    command: str
    parameters: dict
    argv: list
    input_hashes: dict = field(default_factory=dict)
    tool_version: str = ""
    format_versions: dict = field(default_factory=lambda: dict(FORMAT_VERSIONS))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RunManifest:
        return cls(**data)


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".meta.json")
