"""Bootstrap distribution of the E0 estimate and the ground-state p-value.

The assessment runs in five steps: take ``H_min``, resample the energies with
replacement ``S`` times, estimate E0 on every resample, treat the estimates as
an empirical distribution, and report the fraction of estimates lying strictly
above ``H_min``.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._threads import worker_count
from .cumulants import EnergySample, CumulantSummary, summarize
from .errors import (
    AuditError,
    DegenerateSampleError,
    EmptyDistributionError,
    ModelViolationError,
)
from .estimators import GroundStateEstimate, ModelParams, estimate_e0, ground_state_estimate

SCHEMA_VERSION = 1
DEFAULT_REPLICATES = 1000
DEFAULT_FAILURE_WARNING = 0.10


@dataclass(frozen=True)
class BootstrapDistribution:
    """Per-replicate E0 estimates, in replicate order, with the failures tallied.

    ``replicate_index[k]`` is the replicate that produced ``estimates[k]``.
    """

    estimates: np.ndarray
    num_requested: int
    num_failed: int
    seed: int
    failures: dict = field(default_factory=dict)
    replicate_index: np.ndarray | None = None

    def __post_init__(self):
        est = np.asarray(self.estimates, dtype=float).reshape(-1)
        if est.size + self.num_failed != self.num_requested:
            raise AuditError("estimates + failures must equal the number of requested replicates")
        if not np.all(np.isfinite(est)):
            raise AuditError("bootstrap estimates must be finite")
        object.__setattr__(self, "estimates", est)

    @property
    def failure_rate(self) -> float:
        return self.num_failed / self.num_requested

    def mean(self) -> float:
        return float(self.estimates.mean())

    def std(self) -> float:
        """Sample standard deviation (ddof=1); 0 for a single estimate."""
        return float(self.estimates.std(ddof=1)) if self.estimates.size > 1 else 0.0

    def histogram(self) -> dict:
        """Freedman-Diaconis binned counts."""
        if self.estimates.size == 0:
            return {"edges": [], "counts": []}
        edges = np.histogram_bin_edges(self.estimates, bins="fd")
        counts, edges = np.histogram(self.estimates, bins=edges)
        return {"edges": edges.tolist(), "counts": counts.tolist()}


def replicate_rng(seed: int, j: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(j)]))


def _replicate(sorted_energies: np.ndarray, params: ModelParams, seed: int, j: int):
    n = sorted_energies.size
    idx = replicate_rng(seed, j).integers(0, n, size=n)
    try:
        return estimate_e0(summarize(sorted_energies[idx]), params), None
    except ModelViolationError:
        return None, "non_positive_skewness"
    except DegenerateSampleError:
        return None, "zero_variance"


def bootstrap_e0(
    sample: EnergySample,
    params: ModelParams = ModelParams(),
    num_replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    workers: int | None = None,
) -> BootstrapDistribution:
    """Resample ``sample`` ``num_replicates`` times and estimate E0 on each resample.

    The sample is sorted first so results do not depend on input order.
    Replicate ``j`` draws its indices from stream ``(seed, j)``. Resamples with
    zero variance or non-positive skewness are counted as failures, never dropped
    silently.
    """
    if not isinstance(sample, EnergySample):
        sample = EnergySample(sample)
    if sample.n < 3:
        raise AuditError(f"need at least 3 energies, got {sample.n}")
    if num_replicates < 1:
        raise AuditError("num_replicates must be >= 1")
    x = np.sort(sample.energies)

    def run(j):
        return _replicate(x, params, seed, j)

    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(num_replicates)))
    else:
        results = [run(j) for j in range(num_replicates)]

    estimates = [e for e, _ in results if e is not None]
    index = [j for j, (e, _) in enumerate(results) if e is not None]
    failures = Counter(reason for _, reason in results if reason is not None)
    num_failed = num_replicates - len(estimates)
    if not estimates:
        raise EmptyDistributionError(
            f"all {num_replicates} bootstrap replicates failed: {dict(failures)}", failures
        )
    return BootstrapDistribution(
        estimates=np.array(estimates),
        num_requested=num_replicates,
        num_failed=num_failed,
        seed=int(seed),
        failures=dict(sorted(failures.items())),
        replicate_index=np.array(index, dtype=np.int64),
    )


def p_value(dist: BootstrapDistribution | np.ndarray, h_min: float) -> float:
    """Fraction of E0 estimates strictly greater than ``h_min`` (ties count as not greater)."""
    est = dist.estimates if isinstance(dist, BootstrapDistribution) else np.asarray(dist, dtype=float)
    if est.size == 0:
        raise EmptyDistributionError("p-value of an empty distribution")
    return np.count_nonzero(est > h_min) / est.size


def delta_h(h_min: float, e0_true: float, relative: bool = True) -> float:
    """Gap between the best sampled energy and the true ground-state energy.

    Relative mode divides by ``|e0_true|``.
    """
    gap = h_min - e0_true
    if not relative:
        return gap
    if e0_true == 0:
        raise AuditError("relative delta_h is undefined for e0_true == 0; use absolute mode")
    return gap / abs(e0_true)


@dataclass
class AssessmentReport:
    h_min: float
    p_value: float
    bootstrap: dict
    direct_estimate: GroundStateEstimate | None
    summary: CumulantSummary
    delta_h: float | None = None
    delta_h_relative: bool = True
    model_flags: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "h_min": self.h_min,
            "p_value": self.p_value,
            "delta_h": self.delta_h,
            "delta_h_relative": self.delta_h_relative,
            "direct_estimate": None if self.direct_estimate is None else self.direct_estimate.to_dict(),
            "summary": self.summary.to_dict(),
            "bootstrap": self.bootstrap,
            "model_flags": list(self.model_flags),
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: dict) -> AssessmentReport:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise AuditError(f"unsupported report schema_version {data.get('schema_version')!r}")
        direct = data.get("direct_estimate")
        return cls(
            h_min=data["h_min"],
            p_value=data["p_value"],
            bootstrap=data["bootstrap"],
            direct_estimate=None if direct is None else GroundStateEstimate.from_dict(direct),
            summary=CumulantSummary.from_dict(data["summary"]),
            delta_h=data.get("delta_h"),
            delta_h_relative=data.get("delta_h_relative", True),
            model_flags=list(data.get("model_flags", [])),
            provenance=dict(data.get("provenance", {})),
            schema_version=data["schema_version"],
        )


def assess(
    sample: EnergySample,
    params: ModelParams = ModelParams(),
    num_replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    e0_true: float | None = None,
    relative_delta: bool = True,
    failure_warning: float = DEFAULT_FAILURE_WARNING,
    keep_estimates: bool = False,
) -> AssessmentReport:
    """Full assessment of one energy sample.

    Returns a report even when the direct (non-bootstrap) estimate fails, as
    long as at least one replicate succeeds; the failure is listed in
    ``model_flags``. The report holds numbers and flags only, no verdict.
    """
    if not isinstance(sample, EnergySample):
        sample = EnergySample(sample)
    # sorted once so every reported number is independent of input order
    sample = EnergySample(np.sort(sample.energies))
    h_min = sample.h_min
    summary = summarize(sample)
    flags = []
    if summary.small_sample:
        flags.append("small_sample")

    direct = None
    try:
        direct = ground_state_estimate(summary, params, e0_true)
    except ModelViolationError:
        flags.append("direct_non_positive_skewness")
    except DegenerateSampleError:
        flags.append("direct_zero_variance")
    if direct is not None:
        if direct.clamped:
            flags.append("error_radicand_clamped")
        if e0_true is not None and not direct.beta_physical:
            flags.append("nonphysical_beta")

    dist = bootstrap_e0(sample, params, num_replicates, seed)
    p = p_value(dist, h_min)
    if dist.failure_rate > failure_warning:
        flags.append("replicate_failure_rate_high")

    gap = None
    if e0_true is not None:
        gap = delta_h(h_min, e0_true, relative=relative_delta)

    boot = {
        "num_requested": dist.num_requested,
        "num_failed": dist.num_failed,
        "failure_rate": dist.failure_rate,
        "failures": dist.failures,
        "mean": dist.mean(),
        "std": dist.std(),
        "histogram": dist.histogram(),
        "seed": dist.seed,
    }
    if keep_estimates:
        boot["estimates"] = dist.estimates.tolist()
    provenance = {
        "alpha": params.alpha,
        "num_replicates": num_replicates,
        "n": sample.n,
        "seed": int(seed),
        "failure_warning_threshold": failure_warning,
    }
    return AssessmentReport(
        h_min=h_min,
        p_value=p,
        bootstrap=boot,
        direct_estimate=direct,
        summary=summary,
        delta_h=gap,
        delta_h_relative=relative_delta,
        model_flags=flags,
        provenance=provenance,
    )


def bootstrap_estimates(report: AssessmentReport) -> np.ndarray:
    if "estimates" not in report.bootstrap:
        raise AuditError("report was built without keep_estimates")
    return np.asarray(report.bootstrap["estimates"], dtype=float)

