"""``annealer-audit`` command line.

Exit codes: 0 success, 1 input/parse error, 2 precondition or model error.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .bootstrap import DEFAULT_FAILURE_WARNING, DEFAULT_REPLICATES, assess, bootstrap_estimates
from .cumulants import summarize
from .errors import AuditError
from .estimators import DEFAULT_ALPHA, DEFAULT_R2_FLOOR, ModelParams, fit_alpha
from .experiments import beta_recovery
from .io import (
    FormatError,
    RunManifest,
    dumps_json,
    file_hash,
    format_energies,
    format_sweep,
    instance_to_dict,
    load_problem,
    read_energies,
    read_json,
    read_sweep,
    sidecar_path,
    spins_json,
    write_instance,
    write_json,
)
from .ising import DEFAULT_BRUTE_FORCE_CAP, TOPOLOGIES, brute_force_ground, random_instance, spins_to_binary
from .sampler import PROPOSAL_ORDERS, MhConfig, run_chain


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(64)
        args.argv = list(args.argv) + ["--seed", str(args.seed)]
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _manifest(args, parameters: dict, inputs=()) -> RunManifest:
    return RunManifest(
        command=args.command,
        parameters=parameters,
        argv=list(args.argv),
        input_hashes={str(p): file_hash(p) for p in inputs},
        tool_version=__version__,
    )


def _emit_json(args, payload: dict) -> None:
    text = dumps_json(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, text: str, sidecar: dict) -> None:
    if args.out:
        Path(args.out).write_text(text)
        write_json(sidecar_path(args.out), sidecar)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_generate_instance(args) -> None:
    seed = _resolve_seed(args)
    topology = args.topology
    if args.edges:
        topology = [tuple(int(v) for v in e) for e in read_json(args.edges)]
    inst = random_instance(args.num_spins, topology, args.base_coupling, args.noise_scale, args.field_scale, seed)
    params = {
        "num_spins": args.num_spins,
        "topology": args.topology if not args.edges else "edge-list",
        "base_coupling": args.base_coupling,
        "noise_scale": args.noise_scale,
        "field_scale": args.field_scale,
        "seed": seed,
    }
    manifest = _manifest(args, params, [args.edges] if args.edges else [])
    if args.out:
        write_instance(args.out, inst)
        write_json(sidecar_path(args.out), {"manifest": manifest.to_dict()})
    else:
        sys.stdout.write(dumps_json(instance_to_dict(inst)))


def cmd_solve_exact(args) -> None:
    inst, offset, kind = load_problem(args.instance)
    e0, states = brute_force_ground(inst, max_spins=args.max_spins)
    payload = {
        "e0": e0,
        "num_ground_states": len(states),
        "ground_states": [spins_json(s) for s in states],
        "input_kind": kind,
    }
    if kind == "qubo":
        payload["offset"] = offset
        payload["qubo_minimum"] = e0 + offset
        payload["binary_ground_states"] = [spins_json(spins_to_binary(s)) for s in states]
    payload["manifest"] = _manifest(args, {"max_spins": args.max_spins}, [args.instance]).to_dict()
    _emit_json(args, payload)


def _mh_config(args, beta_mh: float) -> MhConfig:
    return MhConfig(
        beta_mh=beta_mh,
        num_samples=args.n,
        burn_in_sweeps=args.burn_in,
        thinning_sweeps=args.thin,
        seed=args.seed,
        proposal_order=args.proposal_order,
    )


def cmd_sample(args) -> None:
    _resolve_seed(args)
    inst, _, _ = load_problem(args.instance)
    config = _mh_config(args, args.beta_mh)
    result = run_chain(inst, config)
    params = asdict(config)
    params["thinning_sweeps"] = config.thinning_for(inst.num_spins)
    sidecar = {
        "beta_mh": config.beta_mh,
        "n": config.num_samples,
        "burn_in_sweeps": config.burn_in_sweeps,
        "thinning_sweeps": params["thinning_sweeps"],
        "proposal_order": config.proposal_order,
        "seed": config.seed,
        "instance_hash": file_hash(args.instance),
        "acceptance_rate": result.acceptance_rate,
        "manifest": _manifest(args, params, [args.instance]).to_dict(),
    }
    _emit_csv(args, format_energies(result.sample), sidecar)


def cmd_assess(args) -> None:
    sample = read_energies(args.energies)
    seed = _resolve_seed(args)
    params = ModelParams(args.alpha)
    report = assess(
        sample,
        params,
        num_replicates=args.S,
        seed=seed,
        e0_true=args.e0_true,
        relative_delta=not args.absolute_delta,
        failure_warning=args.failure_warning,
        keep_estimates=bool(args.estimates_csv),
    )
    payload = report.to_dict()
    if args.estimates_csv:
        estimates = bootstrap_estimates(report)
        Path(args.estimates_csv).write_text("e0\n" + "".join(f"{e!r}\n" for e in estimates.tolist()))
        del payload["bootstrap"]["estimates"]
    payload["provenance"]["input_hashes"] = {str(args.energies): file_hash(args.energies)}
    payload["manifest"] = _manifest(
        args,
        {
            "alpha": args.alpha,
            "S": args.S,
            "seed": seed,
            "e0_true": args.e0_true,
            "absolute_delta": args.absolute_delta,
            "failure_warning": args.failure_warning,
        },
        [args.energies],
    ).to_dict()
    _emit_json(args, payload)


def _points_from_path(path: Path) -> list[tuple[float, float]]:
    if path.is_dir():
        points = []
        for csv_path in sorted(path.glob("*.csv")):
            meta = sidecar_path(csv_path)
            if not meta.exists():
                continue
            beta = read_json(meta).get("beta_mh")
            if beta is None:
                continue
            summary = summarize(read_energies(csv_path))
            points.append((float(beta), summary.eta if summary.eta_defined else float("nan")))
        if not points:
            raise FormatError(f"{path}: no energy CSVs with beta_mh sidecars found")
        return points
    return [(r["beta_mh"], r["eta"]) for r in read_sweep(path)]


def cmd_fit_alpha(args) -> None:
    path = Path(args.source)
    if not path.exists():
        raise FileNotFoundError(f"{path}: no such file or directory")
    fit = fit_alpha(_points_from_path(path), threshold=args.threshold, r2_floor=args.r2_floor)
    payload = {
        "alpha": fit.alpha,
        "r2": fit.r2,
        "threshold_used": fit.threshold_used,
        "heuristic_threshold": fit.heuristic_threshold,
        "fit": fit.to_dict(),
    }
    inputs = sorted(path.glob("*.csv")) if path.is_dir() else [path]
    payload["manifest"] = _manifest(
        args, {"threshold": args.threshold, "r2_floor": args.r2_floor}, inputs
    ).to_dict()
    _emit_json(args, payload)


def cmd_beta_recovery(args) -> None:
    _resolve_seed(args)
    inst, _, _ = load_problem(args.instance)
    template = _mh_config(args, args.beta_grid[0])
    rows = beta_recovery(inst, args.beta_grid, ModelParams(args.alpha), template, e0_true=args.e0_true)
    params = asdict(template)
    params.pop("beta_mh")
    params.update(beta_grid=args.beta_grid, alpha=args.alpha, e0_true=args.e0_true)
    sidecar = {"manifest": _manifest(args, params, [args.instance]).to_dict()}
    _emit_csv(args, format_sweep(rows), sidecar)


def cmd_replay(args) -> None:
    data = read_json(args.manifest)
    manifest = data.get("manifest", data) if isinstance(data, dict) else None
    if not isinstance(manifest, dict) or "argv" not in manifest:
        raise FormatError(f"{args.manifest}: no run manifest found")
    code = main(manifest["argv"])
    if code:
        raise SystemExit(code)


def _add_mh_options(p) -> None:
    p.add_argument("--n", type=int, default=1000, help="number of recorded energies")
    p.add_argument("--seed", type=int, default=None, help="64-bit seed (generated and printed if omitted)")
    p.add_argument("--burn-in", type=int, default=1000, help="burn-in sweeps")
    p.add_argument("--thin", type=int, default=None, help="sweeps between records (default: number of spins)")
    p.add_argument("--proposal-order", choices=PROPOSAL_ORDERS, default="random")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annealer-audit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-instance", help="random Ising instance with J = J0 + uniform noise")
    p.add_argument("--num-spins", type=int, required=True)
    p.add_argument("--topology", choices=TOPOLOGIES, default="full")
    p.add_argument("--edges", help="JSON file with a list of [i, j] pairs (overrides --topology)")
    p.add_argument("--base-coupling", type=float, default=0.0)
    p.add_argument("--noise-scale", type=float, default=1.0)
    p.add_argument("--field-scale", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate_instance)

    p = sub.add_parser("solve-exact", help="exhaustive ground state of a small instance")
    p.add_argument("instance")
    p.add_argument("--max-spins", type=int, default=DEFAULT_BRUTE_FORCE_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("sample", help="Metropolis-Hastings energy sample")
    p.add_argument("instance")
    p.add_argument("--beta-mh", type=float, required=True)
    _add_mh_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("assess", help="bootstrap p-value for ground-state presence")
    p.add_argument("energies")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--S", type=int, default=DEFAULT_REPLICATES, help="bootstrap replicates")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--e0-true", type=float, default=None)
    p.add_argument("--absolute-delta", action="store_true", help="report H_min - E0 instead of the relative gap")
    p.add_argument("--failure-warning", type=float, default=DEFAULT_FAILURE_WARNING)
    p.add_argument("--estimates-csv", help="also write the raw bootstrap E0 values here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("fit-alpha", help="fit eta ~ beta_mh^(alpha/2) on a sweep CSV or sample directory")
    p.add_argument("source")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--r2-floor", type=float, default=DEFAULT_R2_FLOOR)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit_alpha)

    p = sub.add_parser("beta-recovery", help="estimated beta vs sampler beta over a grid")
    p.add_argument("instance")
    p.add_argument("--beta-grid", type=_floats, required=True, help="comma-separated beta_mh values")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--e0-true", type=float, default=None, help="skip exhaustive search and use this E0")
    _add_mh_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_beta_recovery)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest or output file")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors are input errors here
        return 1 if exc.code == 2 else int(exc.code or 0)
    args.argv = argv
    try:
        args.func(args)
    except AuditError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"input error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
