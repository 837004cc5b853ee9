"""Metropolis-Hastings sampling of Ising energies at a fixed inverse temperature.

A sweep is ``N`` single-spin-flip proposals. A flip raising the energy by
``dE >= 0`` is accepted with probability ``exp(-beta_mh * dE)``; downhill
flips are always accepted.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .cumulants import EnergySample
from ._threads import worker_count
from .errors import AuditError, DimensionMismatchError
from .ising import IsingInstance, energy

PROPOSAL_ORDERS = ("random", "sequential")


def acceptance_probability(delta_energy: float, beta_mh: float) -> float:
    if beta_mh < 0:
        raise AuditError(f"beta_mh must be non-negative, got {beta_mh}")
    if delta_energy < 0:
        return 1.0
    return math.exp(-beta_mh * delta_energy)


@dataclass(frozen=True)
class MhConfig:
    """Chain schedule.

    ``thinning_sweeps=None`` means ``N`` sweeps between records. ``proposal_order``
    is ``"random"`` (uniform site per proposal) or ``"sequential"`` (sites
    ``0..N-1`` in turn). ``check_every`` is the number of records between full
    energy recomputations that reset the incremental bookkeeping.
    """

    beta_mh: float
    num_samples: int
    burn_in_sweeps: int = 1000
    thinning_sweeps: int | None = None
    seed: int = 0
    proposal_order: str = "random"
    check_every: int = 100

    def __post_init__(self):
        if self.beta_mh < 0 or not math.isfinite(self.beta_mh):
            raise AuditError(f"beta_mh must be finite and non-negative, got {self.beta_mh}")
        if self.num_samples < 1:
            raise AuditError("num_samples must be >= 1")
        if self.burn_in_sweeps < 0:
            raise AuditError("burn_in_sweeps must be >= 0")
        if self.thinning_sweeps is not None and self.thinning_sweeps < 1:
            raise AuditError("thinning_sweeps must be >= 1")
        if self.proposal_order not in PROPOSAL_ORDERS:
            raise AuditError(f"proposal_order must be one of {PROPOSAL_ORDERS}")
        if not 0 <= int(self.seed) < 2**64:
            raise AuditError("seed must fit in an unsigned 64-bit integer")
        if self.check_every < 1:
            raise AuditError("check_every must be >= 1")

    def thinning_for(self, num_spins: int) -> int:
        return self.thinning_sweeps if self.thinning_sweeps is not None else num_spins


@dataclass(frozen=True)
class ChainResult:
    sample: EnergySample
    final_spins: np.ndarray
    acceptance_rate: float
    configs: np.ndarray | None = None


@njit(cache=True, nogil=True)
def _mh_block(coupling, field, spins, current, beta, sites, uniforms):
    n = spins.shape[0]
    accepted = 0
    for k in range(sites.shape[0]):
        i = sites[k]
        local = field[i]
        for j in range(n):
            local += coupling[i, j] * spins[j]
        delta = -2.0 * spins[i] * local
        if delta < 0.0 or uniforms[k] < math.exp(-beta * delta):
            spins[i] = -spins[i]
            current += delta
            accepted += 1
    return current, accepted


def _full_energy(coupling: np.ndarray, field: np.ndarray, spins: np.ndarray) -> float:
    s = spins.astype(float)
    return float(0.5 * s @ coupling @ s + field @ s)


def chain_rng(seed: int, chain_index: int = 0) -> np.random.Generator:
    """Per-chain stream; the same (seed, index) gives the same stream in any execution order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chain_index)]))


def run_chain(
    instance: IsingInstance,
    config: MhConfig,
    initial=None,
    chain_index: int = 0,
    keep_configs: bool = False,
) -> ChainResult:
    """Run one chain and record ``num_samples`` energies.

    After ``burn_in_sweeps`` sweeps the current energy is recorded every
    ``thinning`` sweeps. Energies are tracked through local flip deltas and reset
    from a full recomputation every ``check_every`` records. With
    ``keep_configs`` the spin configuration at each record is kept as well.
    """
    n = instance.num_spins
    rng = chain_rng(config.seed, chain_index)
    if initial is None:
        spins = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
    else:
        spins = np.array(initial, dtype=np.int8)
        if spins.shape != (n,):
            raise DimensionMismatchError(f"initial configuration has shape {spins.shape}, expected ({n},)")
        if not np.all((spins == 1) | (spins == -1)):
            raise AuditError("initial spins must be -1 or +1")
    coupling = np.ascontiguousarray(instance.coupling_matrix, dtype=np.float64)
    field = np.ascontiguousarray(instance.field_vector, dtype=np.float64)
    beta = float(config.beta_mh)
    thin = config.thinning_for(n)
    sequential = np.tile(np.arange(n, dtype=np.int64), thin)

    def advance(current, sweeps):
        if config.proposal_order == "sequential":
            sites = sequential if sweeps == thin else np.tile(np.arange(n, dtype=np.int64), sweeps)
        else:
            sites = rng.integers(0, n, size=sweeps * n, dtype=np.int64)
        uniforms = rng.random(sites.size)
        return _mh_block(coupling, field, spins, current, beta, sites, uniforms)

    current = _full_energy(coupling, field, spins)
    accepted = proposals = 0
    # burn-in in bounded chunks to cap memory
    remaining = config.burn_in_sweeps
    while remaining > 0:
        step = min(remaining, max(1, 100_000 // n))
        current, acc = advance(current, step)
        accepted += acc
        proposals += step * n
        remaining -= step
    current = _full_energy(coupling, field, spins)

    out = np.empty(config.num_samples)
    configs = np.empty((config.num_samples, n), dtype=np.int8) if keep_configs else None
    for r in range(config.num_samples):
        current, acc = advance(current, thin)
        accepted += acc
        proposals += thin * n
        if (r + 1) % config.check_every == 0:
            current = _full_energy(coupling, field, spins)
        out[r] = current
        if configs is not None:
            configs[r] = spins
    rate = accepted / proposals if proposals else 0.0
    return ChainResult(EnergySample(out), spins.copy(), rate, configs)


def sweep_beta(
    instance: IsingInstance, beta_grid: Sequence[float], template: MhConfig, workers: int | None = None
) -> list[tuple[float, EnergySample]]:
    """One independent chain per grid point; chain ``k`` uses stream ``(template.seed, k)``."""
    grid = [float(b) for b in beta_grid]
    if not grid:
        raise AuditError("beta grid is empty")

    def one(k):
        res = run_chain(instance, replace(template, beta_mh=grid[k]), chain_index=k)
        return grid[k], res.sample

    workers = workers or worker_count()
    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(len(grid))))
    return [one(k) for k in range(len(grid))]


def recorded_energy_drift(instance: IsingInstance, result: ChainResult) -> float:
    """Largest |recorded - recomputed| energy over the kept configurations."""
    if result.configs is None:
        raise AuditError("chain was run without keep_configs")
    recomputed = np.array([energy(instance, c) for c in result.configs])
    return float(np.max(np.abs(recomputed - result.sample.energies)))
