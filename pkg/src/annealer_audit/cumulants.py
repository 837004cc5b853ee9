"""Sample cumulants of energy samples.

Orders 2 and 3 use the unbiased k-statistics; orders 4 and 6 are plug-in
cumulants built from (biased) central moments, which is all the error
propagation in :mod:`annealer_audit.estimators` needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AuditError, UndefinedSkewnessError

MIN_SAMPLE_SIZE = 30


@dataclass(frozen=True)
class EnergySample:
    """Ordered energies ``H_1 .. H_n`` from independent solver runs."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=float).reshape(-1)
        if e.size < 1:
            raise AuditError("energy sample is empty")
        if not np.all(np.isfinite(e)):
            raise AuditError("energy sample contains non-finite values")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    def __len__(self):
        return self.energies.size

    def __eq__(self, other):
        if not isinstance(other, EnergySample):
            return NotImplemented
        return np.array_equal(self.energies, other.energies)

    __hash__ = None

    @property
    def n(self) -> int:
        return self.energies.size

    @property
    def h_min(self) -> float:
        return float(self.energies.min())


def central_moments(x: np.ndarray, orders=(2, 3, 4, 6)) -> tuple[float, dict[int, float]]:
    """Mean and central moments ``m_k = mean((x - mean)**k)``.

    Two passes with a mean correction on the second, so a large common offset
    does not cancel away the low-order moments.
    """
    x = np.asarray(x, dtype=float)
    mean = x.mean()
    d = x - mean
    correction = d.mean()
    mean += correction
    d -= correction
    moments = {}
    power = d * d
    for k in range(2, max(orders) + 1):
        if k > 2:
            power = power * d
        if k in orders:
            moments[k] = float(power.mean())
    return float(mean), moments


@dataclass(frozen=True)
class CumulantSummary:
    """Low-order statistics of an energy sample.

    ``k2``/``k3`` are the unbiased k-statistics (variance and third cumulant);
    ``c4_hat``/``c6_hat`` are plug-in cumulants; ``eta`` is ``k3 / k2**1.5``
    (NaN when ``k2 == 0``).
    """

    n: int
    mean: float
    k2: float
    k3: float
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    m6: float = 0.0
    c4_hat: float = 0.0
    c6_hat: float = 0.0
    eta: float = field(init=False)

    def __post_init__(self):
        if self.k2 < 0:
            raise AuditError(f"variance estimate must be non-negative, got {self.k2}")
        eta = self.k3 / self.k2**1.5 if self.k2 > 0 else math.nan
        object.__setattr__(self, "eta", eta)

    @classmethod
    def from_cumulants(cls, mean, variance, c3, n=MIN_SAMPLE_SIZE, c4=0.0, c6=0.0) -> CumulantSummary:
        """Summary built from given cumulant values rather than from data."""
        return cls(n=n, mean=mean, k2=variance, k3=c3, m2=variance, m3=c3, c4_hat=c4, c6_hat=c6)

    @classmethod
    def from_shape(cls, mean, sigma, eta, n=MIN_SAMPLE_SIZE, c4=0.0, c6=0.0) -> CumulantSummary:
        """Summary from mean, standard deviation and skewness."""
        return cls.from_cumulants(mean, sigma**2, eta * sigma**3, n=n, c4=c4, c6=c6)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.k2)

    @property
    def eta_defined(self) -> bool:
        return self.k2 > 0

    @property
    def small_sample(self) -> bool:
        """Error-calculus quantities (orders 4, 6) are unreliable below ``MIN_SAMPLE_SIZE``."""
        return self.n < MIN_SAMPLE_SIZE

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "k2": self.k2,
            "k3": self.k3,
            "m2": self.m2,
            "m3": self.m3,
            "m4": self.m4,
            "m6": self.m6,
            "c4_hat": self.c4_hat,
            "c6_hat": self.c6_hat,
            "eta": None if math.isnan(self.eta) else self.eta,
            "small_sample": self.small_sample,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CumulantSummary:
        keys = ("n", "mean", "k2", "k3", "m2", "m3", "m4", "m6", "c4_hat", "c6_hat")
        return cls(**{k: data[k] for k in keys})


def summarize(sample) -> CumulantSummary:
    """Mean, k-statistics and plug-in higher cumulants of a sample (``n >= 3``)."""
    x = sample.energies if isinstance(sample, EnergySample) else EnergySample(sample).energies
    n = x.size
    if n < 3:
        raise AuditError(f"need at least 3 energies for a third cumulant, got {n}")
    if x.min() == x.max():
        v = float(x[0])
        return CumulantSummary(n=n, mean=v, k2=0.0, k3=0.0)
    mean, m = central_moments(x)
    m2, m3, m4, m6 = m[2], m[3], m[4], m[6]
    k2 = n * m2 / (n - 1)
    k3 = n * n * m3 / ((n - 1) * (n - 2))
    c4 = m4 - 3.0 * m2**2
    c6 = m6 - 15.0 * m4 * m2 - 10.0 * m3**2 + 30.0 * m2**3
    return CumulantSummary(n=n, mean=mean, k2=k2, k3=k3, m2=m2, m3=m3, m4=m4, m6=m6, c4_hat=c4, c6_hat=c6)


def skewness(summary: CumulantSummary) -> float:
    if not summary.k2 > 0:
        raise UndefinedSkewnessError("skewness is undefined for a zero-variance sample")
    return summary.k3 / summary.k2**1.5
