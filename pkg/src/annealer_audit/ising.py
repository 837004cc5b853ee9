"""Ising / QUBO instances, energy evaluation and an exhaustive ground-state oracle.

Energies follow

    H(s) = sum_{(i,j) in E} J_ij s_i s_j + sum_i h_i s_i,    s_i in {-1, +1}

and a QUBO ``x^T Q x`` maps onto it through ``x = (s + 1) / 2``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._threads import worker_count
from .errors import DimensionMismatchError, SizeCapError

DEFAULT_BRUTE_FORCE_CAP = 24
TOPOLOGIES = ("full", "grid")

# Brute-force energies within this (scale-relative) band of the minimum count as degenerate.
_DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True, eq=True)
class IsingInstance:
    """One Ising problem.

    Parameters
    ----------
    num_spins : int
        Number of spins N.
    couplings : mapping of (i, j) -> float
        Pair couplings. Keys are normalised to ``i < j``; self-couplings and
        duplicate pairs (in either orientation) are rejected.
    fields : mapping of i -> float
        Local fields. Missing indices mean ``h_i = 0``.
    """

    num_spins: int
    couplings: Mapping[tuple[int, int], float] = field(default_factory=dict)
    fields: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        n = int(self.num_spins)
        if n < 1:
            raise ValueError(f"num_spins must be positive, got {self.num_spins}")
        couplings: dict[tuple[int, int], float] = {}
        for key, value in dict(self.couplings).items():
            i, j = (int(k) for k in key)
            if i == j:
                raise ValueError(f"self-coupling ({i}, {i}) is not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"coupling index ({i}, {j}) outside [0, {n})")
            pair = (i, j) if i < j else (j, i)
            if pair in couplings:
                raise ValueError(f"pair {pair} appears more than once")
            couplings[pair] = float(value)
        fields: dict[int, float] = {}
        for key, value in dict(self.fields).items():
            i = int(key)
            if not 0 <= i < n:
                raise ValueError(f"field index {i} outside [0, {n})")
            if i in fields:
                raise ValueError(f"field {i} appears more than once")
            fields[i] = float(value)
        object.__setattr__(self, "num_spins", n)
        object.__setattr__(self, "couplings", dict(sorted(couplings.items())))
        object.__setattr__(self, "fields", dict(sorted(fields.items())))

    @classmethod
    def from_lists(cls, num_spins, couplings=(), fields=()):
        """Build from ``[[i, j, J], ...]`` and ``[[i, h], ...]`` lists (the file layout)."""
        coupling_map: dict[tuple[int, int], float] = {}
        for i, j, value in couplings:
            key = (int(i), int(j)) if int(i) < int(j) else (int(j), int(i))
            if key in coupling_map:
                raise ValueError(f"pair {key} appears more than once")
            coupling_map[key] = value
        field_map: dict[int, float] = {}
        for i, value in fields:
            if int(i) in field_map:
                raise ValueError(f"field {int(i)} appears more than once")
            field_map[int(i)] = value
        return cls(num_spins, coupling_map, field_map)

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """Dense symmetric J with zero diagonal (each pair stored in both triangles)."""
        mat = np.zeros((self.num_spins, self.num_spins))
        for (i, j), value in self.couplings.items():
            mat[i, j] = value
            mat[j, i] = value
        mat.setflags(write=False)
        return mat

    @cached_property
    def field_vector(self) -> np.ndarray:
        vec = np.zeros(self.num_spins)
        for i, value in self.fields.items():
            vec[i] = value
        vec.setflags(write=False)
        return vec

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(self.couplings)

    def energy_scale(self) -> float:
        """Sum of absolute coefficients; an upper bound on |H|."""
        return sum(abs(v) for v in self.couplings.values()) + sum(abs(v) for v in self.fields.values())


@dataclass(frozen=True)
class QuboInstance:
    """QUBO ``min x^T Q x`` over binary x, stored upper-triangular.

    Symmetric or general square input is folded: ``U_ij = Q_ij + Q_ji`` for
    ``i < j``, diagonal unchanged, so ``x^T Q x`` is preserved.
    """

    matrix: np.ndarray

    def __post_init__(self):
        q = np.array(self.matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 1:
            raise ValueError(f"QUBO matrix must be square and non-empty, got shape {q.shape}")
        upper = np.triu(q) + np.triu(q.T, k=1)
        upper.setflags(write=False)
        object.__setattr__(self, "matrix", upper)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_entries(cls, dimension: int, entries: Iterable[Sequence[float]]) -> QuboInstance:
        """Accumulate ``[i, j, q]`` entries; repeated or mirrored entries add up."""
        q = np.zeros((int(dimension), int(dimension)))
        for i, j, value in entries:
            i, j = int(i), int(j)
            if not (0 <= i < dimension and 0 <= j < dimension):
                raise ValueError(f"QUBO entry ({i}, {j}) outside [0, {dimension})")
            q[i, j] += float(value)
        return cls(q)

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise DimensionMismatchError(f"expected {self.dimension} binary variables, got shape {x.shape}")
        return float(x @ self.matrix @ x)


def _as_spins(instance: IsingInstance, config) -> np.ndarray:
    spins = np.asarray(config)
    if spins.shape != (instance.num_spins,):
        raise DimensionMismatchError(
            f"configuration has shape {spins.shape}, instance has {instance.num_spins} spins"
        )
    if not np.all((spins == 1) | (spins == -1)):
        raise ValueError("spin values must be -1 or +1")
    return spins


def energy(instance: IsingInstance, config) -> float:
    """Energy of one configuration, summed term by term over the stored entries."""
    s = _as_spins(instance, config)
    total = 0.0
    for (i, j), value in instance.couplings.items():
        total += value * s[i] * s[j]
    for i, value in instance.fields.items():
        total += value * s[i]
    return float(total)


def energies(instance: IsingInstance, configs) -> np.ndarray:
    """Vectorised energies for a ``(m, N)`` array of spin rows."""
    s = np.asarray(configs, dtype=float)
    if s.ndim != 2 or s.shape[1] != instance.num_spins:
        raise DimensionMismatchError(f"expected shape (m, {instance.num_spins}), got {s.shape}")
    pairwise = 0.5 * np.sum((s @ instance.coupling_matrix) * s, axis=1)
    return pairwise + s @ instance.field_vector


def qubo_to_ising(qubo: QuboInstance) -> tuple[IsingInstance, float]:
    """Map a QUBO onto an Ising instance plus constant offset.

    With ``x = (s + 1) / 2`` the identity ``x^T Q x = energy(instance, s) + offset``
    holds for every configuration.
    """
    u = qubo.matrix
    n = qubo.dimension
    couplings: dict[tuple[int, int], float] = {}
    h = np.diag(u) / 2.0
    offset = float(np.sum(np.diag(u))) / 2.0
    for i in range(n):
        for j in range(i + 1, n):
            q = u[i, j]
            if q == 0.0:
                continue
            couplings[(i, j)] = q / 4.0
            h[i] += q / 4.0
            h[j] += q / 4.0
            offset += q / 4.0
    fields = {i: float(v) for i, v in enumerate(h) if v != 0.0}
    return IsingInstance(n, couplings, fields), offset


def spins_to_binary(config) -> np.ndarray:
    return ((np.asarray(config) + 1) // 2).astype(np.int8)


def binary_to_spins(x) -> np.ndarray:
    return (2 * np.asarray(x) - 1).astype(np.int8)


def _enumerate_block(start: int, stop: int, n: int) -> np.ndarray:
    """Spin rows for configuration indices in ``[start, stop)``; bit k of the index is spin k (1 -> +1)."""
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)




def brute_force_ground(
    instance: IsingInstance,
    max_spins: int = DEFAULT_BRUTE_FORCE_CAP,
    block_size: int = 1 << 16,
    workers: int | None = None,
) -> tuple[float, list[np.ndarray]]:
    """Exact ground-state energy and every minimising configuration.

    Enumerates all ``2**N`` configurations in blocks (optionally across threads);
    the result does not depend on the partitioning. Configurations whose energy
    lies within ``1e-9 * max(1, scale)`` of the minimum are treated as degenerate,
    and the returned energy is recomputed with :func:`energy` on those candidates.

    Returns
    -------
    e0 : float
    ground_states : list of int8 arrays, ordered by configuration index
    """
    n = instance.num_spins
    if n > max_spins:
        raise SizeCapError(f"instance has {n} spins; exhaustive search is capped at {max_spins}")
    total = 1 << n
    tol = _DEGENERACY_RTOL * max(1.0, instance.energy_scale())
    bounds = [(lo, min(lo + block_size, total)) for lo in range(0, total, block_size)]

    def scan(bound):
        lo, hi = bound
        e = energies(instance, _enumerate_block(lo, hi, n))
        best = e.min()
        keep = np.nonzero(e <= best + tol)[0]
        return best, [(lo + int(k), float(e[k])) for k in keep]

    workers = workers or worker_count()
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(scan, bounds))
    else:
        results = [scan(b) for b in bounds]

    best = min(r[0] for r in results)
    candidates = [(idx, e) for r in results for idx, e in r[1] if e <= best + tol]
    states = [_enumerate_block(idx, idx + 1, n)[0] for idx, _ in sorted(candidates)]
    exact = [energy(instance, s) for s in states]
    e0 = min(exact)
    return e0, states


def _grid_edges(num_spins: int) -> list[tuple[int, int]]:
    width = math.ceil(math.sqrt(num_spins))
    edges = []
    for k in range(num_spins):
        if (k + 1) % width != 0 and k + 1 < num_spins:
            edges.append((k, k + 1))
        if k + width < num_spins:
            edges.append((k, k + width))
    return edges


def topology_edges(num_spins: int, topology) -> list[tuple[int, int]]:
    """Edge list for ``"full"``, ``"grid"`` (open-boundary near-square lattice) or an explicit list."""
    if isinstance(topology, str):
        if topology == "full":
            return [(i, j) for i in range(num_spins) for j in range(i + 1, num_spins)]
        if topology == "grid":
            return _grid_edges(num_spins)
        raise ValueError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES} or an edge list")
    edges = sorted({(min(int(i), int(j)), max(int(i), int(j))) for i, j in topology})
    return edges


def random_instance(
    num_spins: int,
    topology="full",
    base_coupling: float = 0.0,
    noise_scale: float = 1.0,
    field_scale: float = 0.0,
    seed: int | None = 0,
) -> IsingInstance:
    """Random instance with couplings ``J_ij = J0 + eps``, eps ~ U[-noise_scale, noise_scale].

    Fields are drawn from U[-field_scale, field_scale]. Deterministic for a given seed.
    Edges are visited in sorted order, couplings first, then fields.
    """
    if num_spins < 1:
        raise ValueError("num_spins must be >= 1")
    if noise_scale < 0 or field_scale < 0:
        raise ValueError("noise_scale and field_scale must be non-negative")
    edges = topology_edges(num_spins, topology)
    rng = np.random.default_rng(seed)
    eps = rng.uniform(-noise_scale, noise_scale, size=len(edges)) if noise_scale > 0 else np.zeros(len(edges))
    h = rng.uniform(-field_scale, field_scale, size=num_spins) if field_scale > 0 else np.zeros(num_spins)
    couplings = {e: base_coupling + float(x) for e, x in zip(edges, eps)}
    fields = {i: float(v) for i, v in enumerate(h) if v != 0.0}
    return IsingInstance(num_spins, couplings, fields)
