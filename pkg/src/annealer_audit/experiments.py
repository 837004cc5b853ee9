"""End-to-end pipelines over Metropolis-Hastings samples with a known ground state."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .bootstrap import assess, bootstrap_e0, p_value
from .cumulants import EnergySample, summarize
from .errors import AuditError
from .estimators import ModelParams, ground_state_estimate
from .ising import IsingInstance, brute_force_ground
from .sampler import MhConfig, sweep_beta


def _row(beta_mh: float, sample: EnergySample, params: ModelParams, e0_true: float) -> dict:
    summary = summarize(sample)
    row = {"beta_mh": beta_mh, "eta": summary.eta if summary.eta_defined else None, "e0_true": e0_true}
    try:
        est = ground_state_estimate(summary, params, e0_true)
    except AuditError:
        return row
    row.update(e0_estimated=est.e0, e0_error=est.delta_e0, beta_estimated=est.beta, delta_beta=est.delta_beta)
    return row


def beta_recovery(
    instance: IsingInstance,
    beta_grid: Sequence[float],
    params: ModelParams,
    template: MhConfig,
    e0_true: float | None = None,
) -> list[dict]:
    """Sample at every grid point and estimate skewness, E0 and beta against the true E0.

    Rows carry ``beta_mh, eta, beta_estimated, e0_estimated, e0_error`` (analytic
    standard error of E0), ``delta_beta`` and ``e0_true``; estimates are ``None``
    where the sample violates the model.
    """
    if e0_true is None:
        e0_true = brute_force_ground(instance)[0]
    return [_row(b, s, params, e0_true) for b, s in sweep_beta(instance, beta_grid, template)]


@dataclass(frozen=True)
class SweepPoint:
    beta_mh: float
    h_min: float
    delta_h: float
    p_value: float
    report: object


def pvalue_sweep(
    instance: IsingInstance,
    beta_grid: Sequence[float],
    params: ModelParams,
    template: MhConfig,
    num_replicates: int = 1000,
    e0_true: float | None = None,
) -> list[SweepPoint]:
    """p-value and relative gap to the ground state across a sampler temperature grid."""
    if e0_true is None:
        e0_true = brute_force_ground(instance)[0]
    points = []
    for k, (b, sample) in enumerate(sweep_beta(instance, beta_grid, template)):
        report = assess(sample, params, num_replicates, seed=template.seed + k, e0_true=e0_true)
        points.append(SweepPoint(b, report.h_min, report.delta_h, report.p_value, report))
    return points


def truncate_bottom(sample: EnergySample, fraction: float) -> EnergySample:
    """Drop the lowest ``ceil(fraction * n)`` energies."""
    x = np.sort(sample.energies)
    k = int(np.ceil(fraction * x.size))
    return EnergySample(x[k:])


def paired_truncation(
    sample: EnergySample, params: ModelParams, fraction: float = 0.05, num_replicates: int = 1000, seed: int = 0
) -> tuple[float, float]:
    """p-values of a sample and of the same sample with its lowest energies removed."""
    full = p_value(bootstrap_e0(sample, params, num_replicates, seed), sample.h_min)
    cut = truncate_bottom(sample, fraction)
    trunc = p_value(bootstrap_e0(cut, params, num_replicates, seed), cut.h_min)
    return full, trunc


def contains_ground_state(sample: EnergySample, e0_true: float, tol: float = 1e-9) -> bool:
    return abs(sample.h_min - e0_true) <= tol * max(1.0, abs(e0_true))

