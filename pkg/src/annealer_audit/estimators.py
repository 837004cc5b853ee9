"""Ground-state energy and inverse-temperature estimators.

Under a power-law specific heat ``c(beta) ~ beta**(-alpha - 2)`` the first
three cumulants of a Boltzmann energy distribution pin down the ground-state
energy::

    E0 = <H> - (alpha + 2) / (alpha + 1) * sigma**4 / c3

and, given a known E0, the effective inverse temperature::

    beta = (E0 - <H>) / (sigma * eta * (E0 - <H>) + sigma**2)
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field

import numpy as np

from .cumulants import CumulantSummary
from .errors import AuditError, DegenerateSampleError, ModelViolationError, SingularityError

DEFAULT_ALPHA = 0.19
ALTERNATIVE_ALPHA = 0.38
DEFAULT_R2_FLOOR = 0.95


@dataclass(frozen=True)
class ModelParams:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not self.alpha > -1:
            raise AuditError(f"alpha must exceed -1, got {self.alpha}")

    @property
    def factor(self) -> float:
        """``(alpha + 2) / (alpha + 1)``."""
        return (self.alpha + 2.0) / (self.alpha + 1.0)


def _check_model(summary: CumulantSummary) -> None:
    if not summary.k2 > 0:
        raise DegenerateSampleError("zero-variance sample: ground-state energy is not identifiable")
    if not summary.k3 > 0:
        raise ModelViolationError(f"non-positive skewness (eta = {summary.eta:.6g}); the model needs eta > 0")


def estimate_e0(summary: CumulantSummary, params: ModelParams = ModelParams()) -> float:
    """Ground-state energy estimate; strictly below the sample mean whenever it exists."""
    _check_model(summary)
    return summary.mean - params.factor * summary.k2**2 / summary.k3


def estimate_beta(summary: CumulantSummary, e0_true: float) -> float:
    """Effective inverse temperature given the ground-state energy.

    A negative value means the sample is inconsistent with the model, but a
    positive one does not prove consistency.
    """
    if not summary.k2 > 0:
        raise DegenerateSampleError("zero-variance sample: beta is not identifiable")
    sigma = math.sqrt(summary.k2)
    eta = summary.k3 / summary.k2**1.5
    gap = e0_true - summary.mean
    denom = sigma * eta * gap + summary.k2
    if denom == 0.0:
        raise SingularityError("beta estimate is singular: sigma*eta*(E0 - <H>) + sigma^2 == 0")
    return gap / denom


@dataclass(frozen=True)
class ErrorBreakdown:
    """Analytic standard error of the E0 estimate and its pieces."""

    delta_e0: float
    delta_e0_from_c3: float
    delta_e0_from_var: float
    delta_c3: float
    delta_var: float
    d_e0_d_c3: float
    d_e0_d_var: float
    clamped: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["clamped"] = list(self.clamped)
        return d


def e0_partials(summary: CumulantSummary, params: ModelParams = ModelParams()) -> tuple[float, float]:
    """``(dE0/dc3, dE0/dsigma^2)`` at the summary's cumulants."""
    c3 = summary.k3
    if c3 == 0.0:
        raise SingularityError("third cumulant is zero; E0 error propagation is singular")
    var = summary.k2
    return params.factor * var**2 / c3**2, -params.factor * 2.0 * var / c3


def error_e0(summary: CumulantSummary, params: ModelParams = ModelParams()) -> ErrorBreakdown:
    """Propagate the sampling error of ``sigma^2`` and ``c3`` into E0.

    The two contributions are combined in quadrature as if independent; the
    error of the mean is neglected. A negative radicand (possible because the
    plug-in c4/c6 may be negative) is clamped to zero and reported in ``clamped``.
    """
    if summary.n < 3:
        raise AuditError(f"need n >= 3, got {summary.n}")
    d_c3, d_var = e0_partials(summary, params)
    delta_c3, delta_var, clamped = _cumulant_errors(summary)
    from_c3 = abs(d_c3) * delta_c3
    from_var = abs(d_var) * delta_var
    return ErrorBreakdown(
        delta_e0=math.hypot(from_c3, from_var),
        delta_e0_from_c3=from_c3,
        delta_e0_from_var=from_var,
        delta_c3=delta_c3,
        delta_var=delta_var,
        d_e0_d_c3=d_c3,
        d_e0_d_var=d_var,
        clamped=tuple(clamped),
    )


def _cumulant_errors(summary: CumulantSummary) -> tuple[float, float, list[str]]:
    n = summary.n
    var, c3, c4, c6 = summary.k2, summary.k3, summary.c4_hat, summary.c6_hat
    clamped = []
    rad_c3 = (c6 + 9.0 * var * c4 + 9.0 * c3**2 + 6.0 * var**3) / n
    if rad_c3 < 0:
        clamped.append("delta_c3")
        rad_c3 = 0.0
    rad_var = (c4 + 2.0 * var**2) / n
    if rad_var < 0:
        clamped.append("delta_var")
        rad_var = 0.0
    return math.sqrt(rad_c3), math.sqrt(rad_var), clamped


def error_beta(summary: CumulantSummary, e0_true: float) -> float:
    """Standard error of :func:`estimate_beta`, propagated from ``sigma^2`` and ``c3`` like the E0 error.

    Diverges where the beta estimate itself is singular.
    """
    if not summary.k2 > 0:
        raise DegenerateSampleError("zero-variance sample: beta is not identifiable")
    var, c3 = summary.k2, summary.k3
    gap = e0_true - summary.mean
    denom = gap * c3 / var + var
    if denom == 0.0:
        raise SingularityError("beta estimate is singular")
    d_c3 = -(gap**2) / (var * denom**2)
    d_var = -gap * (1.0 - gap * c3 / var**2) / denom**2
    delta_c3, delta_var, _ = _cumulant_errors(summary)
    return math.hypot(d_c3 * delta_c3, d_var * delta_var)


@dataclass(frozen=True)
class GroundStateEstimate:
    e0: float
    delta_e0: float
    delta_e0_from_c3: float
    delta_e0_from_var: float
    beta: float | None
    beta_physical: bool
    alpha_used: float
    clamped: tuple[str, ...] = ()
    delta_beta: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["clamped"] = list(self.clamped)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> GroundStateEstimate:
        data = dict(data)
        data["clamped"] = tuple(data.get("clamped", ()))
        return cls(**data)


def ground_state_estimate(
    summary: CumulantSummary, params: ModelParams = ModelParams(), e0_true: float | None = None
) -> GroundStateEstimate:
    """E0 with its analytic error, plus beta when the true ground-state energy is known."""
    e0 = estimate_e0(summary, params)
    err = error_e0(summary, params)
    beta = delta_beta = None
    if e0_true is not None:
        try:
            beta = estimate_beta(summary, e0_true)
            delta_beta = error_beta(summary, e0_true)
        except SingularityError:
            pass
    return GroundStateEstimate(
        e0=e0,
        delta_e0=err.delta_e0,
        delta_e0_from_c3=err.delta_e0_from_c3,
        delta_e0_from_var=err.delta_e0_from_var,
        beta=beta,
        beta_physical=beta is not None and beta > 0,
        alpha_used=params.alpha,
        clamped=err.clamped,
        delta_beta=delta_beta,
    )


@dataclass(frozen=True)
class AlphaFit:
    """Log-log fit of skewness against sampler inverse temperature."""

    alpha: float
    slope: float
    intercept: float
    r2: float
    threshold_used: float
    heuristic_threshold: bool
    betas: tuple[float, ...]
    residuals: tuple[float, ...]
    num_excluded_nonpositive: int
    r2_floor: float = DEFAULT_R2_FLOOR
    candidates: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["betas"] = list(self.betas)
        d["residuals"] = list(self.residuals)
        d["candidates"] = [list(c) for c in self.candidates]
        return d


def _loglog_fit(beta: np.ndarray, eta: np.ndarray) -> tuple[float, float, float, np.ndarray]:
    x, y = np.log(beta), np.log(eta)
    if np.ptp(x) == 0:
        raise AuditError("alpha fit needs at least two distinct beta_mh values")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2, resid


def fit_alpha(
    points: Iterable[tuple[float, float]],
    threshold: float | None = None,
    r2_floor: float = DEFAULT_R2_FLOOR,
) -> AlphaFit:
    """Fit ``eta ∝ beta_mh**(alpha/2)`` by least squares on log eta vs log beta_mh.

    Points with non-positive beta_mh or eta are dropped and counted. Only points
    with ``beta_mh <= threshold`` enter the fit. Without a threshold, every
    prefix of the sorted grid (>= 2 points) is tried and the longest prefix whose
    R^2 reaches ``r2_floor`` wins; this cutoff is a heuristic and is flagged as such.
    """
    pts = [(float(b), float(e)) for b, e in points]
    usable = sorted((b, e) for b, e in pts if b > 0 and e > 0 and math.isfinite(b) and math.isfinite(e))
    excluded = len(pts) - len(usable)
    heuristic = threshold is None
    candidates = []
    if threshold is not None:
        chosen = [(b, e) for b, e in usable if b <= threshold]
        if len(chosen) < 2:
            raise AuditError(
                f"alpha fit needs >= 2 usable points at or below beta_mh = {threshold}, found {len(chosen)}"
            )
        cut = threshold
    else:
        if len(usable) < 2:
            raise AuditError(f"alpha fit needs >= 2 usable points, found {len(usable)}")
        chosen = usable[:2]
        for k in range(2, len(usable) + 1):
            prefix = usable[:k]
            if prefix[-1][0] == prefix[0][0]:
                continue
            r2 = _loglog_fit(np.array([p[0] for p in prefix]), np.array([p[1] for p in prefix]))[2]
            candidates.append((prefix[-1][0], r2))
            if r2 >= r2_floor:
                chosen = prefix
        cut = chosen[-1][0]
    beta = np.array([p[0] for p in chosen])
    eta = np.array([p[1] for p in chosen])
    slope, intercept, r2, resid = _loglog_fit(beta, eta)
    return AlphaFit(
        alpha=2.0 * slope,
        slope=slope,
        intercept=intercept,
        r2=r2,
        threshold_used=cut,
        heuristic_threshold=heuristic,
        betas=tuple(beta.tolist()),
        residuals=tuple(resid.tolist()),
        num_excluded_nonpositive=excluded,
        r2_floor=r2_floor,
        candidates=tuple(candidates),
    )
