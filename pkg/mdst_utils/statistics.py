"""
Empirical distributions and Kolmogorov-Smirnov statistics.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Union

import numpy as np
from scipy import special, stats

from mdst_utils.errors import EmptySampleError, InvalidInputError, InvalidParameterError


@dataclass
class EmpiricalDistribution:
    """Sorted sample with its mean, unbiased variance and standard error."""
    samples: np.ndarray
    mean: float = field(init=False)
    variance: float = field(init=False)
    stderr: float = field(init=False)

    def __post_init__(self):
        values = np.sort(np.asarray(self.samples, dtype=np.float64).ravel())
        if values.size == 0:
            raise EmptySampleError("An empirical distribution needs at least one sample")
        self.samples = values
        self.mean = float(np.mean(values))
        self.variance = float(np.var(values, ddof=1)) if values.size > 1 else 0.0
        self.stderr = math.sqrt(self.variance / values.size)

    @classmethod
    def from_samples(cls, values) -> 'EmpiricalDistribution':
        return cls(np.asarray(values, dtype=np.float64))

    @property
    def size(self) -> int:
        return int(self.samples.size)

    def quantile(self, q: float) -> float:
        if not 0 <= q <= 1:
            raise InvalidParameterError(f"Quantile level must lie in [0, 1], got {q}")
        return float(np.quantile(self.samples, q))

    def cdf(self, x) -> np.ndarray:
        """Right-continuous empirical CDF evaluated at ``x``."""
        return np.searchsorted(self.samples, x, side='right') / self.size

    def summary(self) -> Dict[str, float]:
        return {
            'count': self.size,
            'mean': self.mean,
            'variance': self.variance,
            'stderr': self.stderr,
            'min': float(self.samples[0]),
            'q05': self.quantile(0.05),
            'median': self.quantile(0.5),
            'q95': self.quantile(0.95),
            'max': float(self.samples[-1]),
        }


SampleLike = Union[EmpiricalDistribution, np.ndarray, list, tuple]


def _as_distribution(values: SampleLike) -> EmpiricalDistribution:
    if isinstance(values, EmpiricalDistribution):
        return values
    return EmpiricalDistribution.from_samples(values)


def ks_two_sample(a: SampleLike, b: SampleLike) -> float:
    """
    Two-sample Kolmogorov-Smirnov statistic, the sup-distance between the
    empirical CDFs, evaluated at every jump point of either sample.
    """
    a = _as_distribution(a)
    b = _as_distribution(b)
    jumps = np.concatenate([a.samples, b.samples])
    return float(np.max(np.abs(a.cdf(jumps) - b.cdf(jumps))))


def ks_critical_value(n: int, m: int, level: float = 0.01) -> float:
    """Asymptotic two-sample KS quantile at significance ``level`` for sizes n and m."""
    if n < 1 or m < 1:
        raise InvalidParameterError("Sample sizes must be positive")
    if not 0 < level < 1:
        raise InvalidParameterError(f"Significance level must lie in (0, 1), got {level}")
    return float(special.kolmogi(level) * math.sqrt((n + m) / (n * m)))


def studentize(values) -> np.ndarray:
    """Centre by the sample mean and scale by the sample standard deviation."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise EmptySampleError("Studentizing needs at least two samples")
    sd = float(np.std(values, ddof=1))
    if sd == 0:
        raise InvalidInputError("Cannot studentize a constant sample")
    return (values - values.mean()) / sd


def normality_diagnostics(values) -> Dict[str, float]:
    """Skewness, excess kurtosis and KS distance to N(0,1) of the studentized sample."""
    z = studentize(values)
    return {
        'skew': float(stats.skew(z)),
        'excess_kurtosis': float(stats.kurtosis(z, fisher=True)),
        'ks_normal': float(stats.kstest(z, 'norm').statistic),
    }
