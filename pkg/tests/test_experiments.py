import numpy as np
import pytest

from annealer_audit.cumulants import summarize
from annealer_audit.estimators import ModelParams, fit_alpha
from annealer_audit.experiments import beta_recovery, pvalue_sweep
from annealer_audit.ising import brute_force_ground, random_instance
from annealer_audit.sampler import MhConfig, sweep_beta


@pytest.fixture(scope="module")
def inst16():
    return random_instance(16, "full", base_coupling=0.0, noise_scale=1.0, field_scale=0.5, seed=0)


def test_beta_recovery_rows(small_instance):
    e0, _ = brute_force_ground(small_instance)
    rows = beta_recovery(small_instance, [0.5], ModelParams(), MhConfig(0.5, 300, burn_in_sweeps=20, seed=1))
    assert len(rows) == 1
    assert rows[0]["beta_mh"] == 0.5 and rows[0]["e0_true"] == e0


def test_beta_recovery_explicit_e0(small_instance):
    rows = beta_recovery(small_instance, [0.5, 1.0], ModelParams(), MhConfig(0.5, 300, seed=1), e0_true=-100.0)
    assert [r["e0_true"] for r in rows] == [-100.0, -100.0]


def test_pvalue_sweep_direction(inst16):
    # within the validity region (physical beta), exact-ground samples outrank the rest
    points = pvalue_sweep(
        inst16, [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0, 1.375, 2.0], ModelParams(), MhConfig(0.1, 1000, seed=0), 1000
    )
    valid = [p for p in points if p.report.direct_estimate is not None and p.report.direct_estimate.beta_physical]
    exact = [p.p_value for p in valid if p.delta_h <= 1e-12]
    rest = [p.p_value for p in valid if p.delta_h > 1e-12]
    assert exact and rest
    assert min(exact) > max(rest)


def test_alpha_stable_across_seed_sets(inst16):
    grid = np.geomspace(0.2, 1.375, 6)
    alphas = []
    for seeds in (range(0, 5), range(5, 10)):
        pts = []
        for seed in seeds:
            pts += [(b, summarize(s).eta) for b, s in sweep_beta(inst16, grid, MhConfig(0.1, 1000, seed=seed))]
        alphas.append(fit_alpha(pts, threshold=1.375).alpha)
    assert abs(alphas[0] - alphas[1]) <= 0.15, alphas
