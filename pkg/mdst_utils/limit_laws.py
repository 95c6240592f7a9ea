"""
Limit constants for the power-weighted MDST length.

Closed forms where they exist; quadrature and Monte Carlo estimates
(with their errors) where they don't.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from mdst_utils.errors import DomainError, InvalidDimensionError, InvalidParameterError
from mdst_utils.geometry import sample_binomial_cloud, unit_ball_volume
from mdst_utils.graphs import INDEXED, build_ong, total_weight
from mdst_utils.rng import replicate_seed

logger = logging.getLogger(__name__)


@dataclass
class LimitConstant:
    """
    A named limit constant.

    Exact values come from closed forms. Estimated ones carry a standard
    error and, for Monte Carlo estimates, the point counts they were run at.
    """
    name: str
    value: float
    exact: bool
    d: Optional[int] = None
    alpha: Optional[float] = None
    stderr: Optional[float] = None
    extrapolated: bool = False
    sample_sizes: Optional[Tuple[int, ...]] = None

    def as_row(self) -> Dict:
        row = asdict(self)
        row['sample_sizes'] = ' '.join(str(m) for m in self.sample_sizes) if self.sample_sizes else None
        return row


@dataclass(frozen=True)
class MonteCarloBudget:
    """Point counts and replicate count for ONG mean-weight estimates."""
    m_small: int = 2000
    m_large: int = 20000
    replicates: int = 20


def _check_d(d: int, minimum: int = 1) -> int:
    if int(d) != d or d < minimum:
        raise InvalidDimensionError(f"Dimension must be an integer >= {minimum}, got {d}")
    return int(d)


def lln_constant(d: int, alpha: float) -> float:
    """2^(alpha/d) Gamma(1 + alpha/d) v_d^(-alpha/d), defined for 0 < alpha < d."""
    d = _check_d(d)
    if not 0 < alpha < d:
        raise DomainError(f"The law-of-large-numbers constant needs 0 < alpha < d, got alpha={alpha}, d={d}")
    ratio = alpha / d
    return float(2 ** ratio * special.gamma(1 + ratio) * unit_ball_volume(d) ** (-ratio))


def lln_constant_quadrature(d: int, alpha: float) -> Tuple[float, float]:
    """
    Integral of exp(-(v_d / 2) s^(d/alpha)) over (0, inf), the mean directed
    nearest-neighbour weight of a point in a homogeneous process.

    Returns:
        (value, absolute error estimate) from scipy.integrate.quad
    """
    d = _check_d(d)
    if not alpha > 0:
        raise InvalidParameterError(f"Exponent alpha must be positive, got {alpha}")
    half_volume = unit_ball_volume(d) / 2
    power = d / alpha
    value, error = integrate.quad(lambda s: math.exp(-half_volume * s ** power), 0, math.inf,
                                  epsabs=0, epsrel=1e-12, limit=200)
    return float(value), float(error)


def xi_mean(d: int, alpha: float) -> LimitConstant:
    value, error = lln_constant_quadrature(d, alpha)
    return LimitConstant('xi_mean', value, exact=False, d=d, alpha=alpha, stderr=error)


def two_over_vd(d: int) -> float:
    """The extra term 2 / v_d contributed at alpha = d."""
    return 2.0 / unit_ball_volume(_check_d(d))


def mu1(alpha: float) -> float:
    """
    Limiting expected weight of the 1-d on-line nearest-neighbour graph,
    (2 / (alpha (alpha + 1))) (1 + 2^-alpha / (alpha - 1)), for alpha > 1.
    """
    if not alpha > 1:
        raise DomainError(f"mu(1, alpha) needs alpha > 1, got {alpha}")
    return 2.0 / (alpha * (alpha + 1)) * (1.0 + 2.0 ** -alpha / (alpha - 1))


def mu1_constant(alpha: float) -> LimitConstant:
    """mu1 wrapped as a constant; values for alpha in (1, 2) are tagged extrapolated."""
    value = mu1(alpha)
    extrapolated = alpha < 2
    if extrapolated:
        logger.warning("mu(1, %s) uses the closed form outside alpha >= 2", alpha)
    return LimitConstant('mu1', value, exact=True, d=1, alpha=alpha, extrapolated=extrapolated)


def estimate_ong_mean_weight(dim: int, alpha: float, m: int, replicates: int,
                             seed: int = 0, strategy: str = INDEXED) -> Tuple[float, float]:
    """
    Monte Carlo mean of the ONG weight on m uniform points in (0,1)^dim.

    Returns:
        (mean, standard error) over ``replicates`` independent sequences
    """
    dim = _check_d(dim)
    if replicates < 2:
        raise InvalidParameterError("At least two replicates are needed for a standard error")
    weights = []
    for rep in range(replicates):
        points = sample_binomial_cloud(m, dim, replicate_seed(seed, dim, m, rep)).coords
        weights.append(total_weight(build_ong(points, strategy), alpha))
    values = np.asarray(weights)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(replicates))


def ong_weight_variances(dim: int, alpha: float, sizes: Sequence[int], replicates: int,
                         seed: int = 0, strategy: str = INDEXED) -> Dict[int, float]:
    """
    Sample variance of the ONG weight on m uniform points in (0,1)^dim, per m.

    For alpha > dim/2 the variance stays bounded as m grows; below, it grows
    like m^(1 - 2 alpha/dim).
    """
    dim = _check_d(dim)
    if replicates < 2:
        raise InvalidParameterError("At least two replicates are needed for a variance")
    variances = {}
    for m in sizes:
        weights = []
        for rep in range(replicates):
            points = sample_binomial_cloud(m, dim, replicate_seed(seed, dim, m, rep)).coords
            weights.append(total_weight(build_ong(points, strategy), alpha))
        variances[int(m)] = float(np.var(weights, ddof=1))
    logger.debug("ONG weight variances in d=%d at alpha=%s: %s", dim, alpha, variances)
    return variances


def mu_prime(d: int, alpha: float, budget: Optional[MonteCarloBudget] = None,
             seed: int = 0) -> LimitConstant:
    """
    Limit of the expected MDST weight for alpha >= d,
    mu(d-1, alpha) + [alpha == d] 2 / v_d.

    For d = 2 both terms are closed forms. For d >= 3, mu(d-1, alpha) is
    estimated from ONG mean weights at two point counts m1 < m2, combined with
    a Richardson step for the m^(1 - alpha/(d-1)) tail of the mean.
    """
    d = _check_d(d, 2)
    if alpha < d:
        raise DomainError(f"mu'(d, alpha) needs alpha >= d, got alpha={alpha}, d={d}")
    boundary_term = two_over_vd(d) if alpha == d else 0.0
    if d == 2:
        return LimitConstant('mu_prime', mu1(alpha) + boundary_term, exact=True, d=d, alpha=alpha)

    budget = budget or MonteCarloBudget()
    if not 1 < budget.m_small < budget.m_large:
        raise InvalidParameterError("Monte Carlo point counts must satisfy 1 < m_small < m_large")
    k = d - 1
    small, small_se = estimate_ong_mean_weight(k, alpha, budget.m_small, budget.replicates, seed)
    large, large_se = estimate_ong_mean_weight(k, alpha, budget.m_large, budget.replicates, seed)
    r = (budget.m_large / budget.m_small) ** (1 - alpha / k)
    value = (large - r * small) / (1 - r)
    stderr = math.sqrt(large_se ** 2 + (r * small_se) ** 2) / (1 - r)
    logger.debug("mu(%d, %s): E at m=%d is %.6g, at m=%d is %.6g, extrapolated %.6g",
                 k, alpha, budget.m_small, small, budget.m_large, large, value)
    return LimitConstant('mu_prime', value + boundary_term, exact=False, d=d, alpha=alpha,
                         stderr=stderr, sample_sizes=(budget.m_small, budget.m_large))


def limit_constants(d: int, alpha: float, budget: Optional[MonteCarloBudget] = None,
                    seed: int = 0):
    """Every constant defined at (d, alpha), in a fixed order."""
    rows = []
    if 0 < alpha < d:
        rows.append(LimitConstant('lln', lln_constant(d, alpha), exact=True, d=d, alpha=alpha))
    rows.append(xi_mean(d, alpha))
    rows.append(LimitConstant('two_over_vd', two_over_vd(d), exact=True, d=d))
    if alpha > 1:
        rows.append(mu1_constant(alpha))
    if d >= 2 and alpha >= d:
        rows.append(mu_prime(d, alpha, budget, seed))
    return rows
