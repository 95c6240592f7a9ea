"""
Boundary coupling between the MDST in a thin base slab and a lower-dimensional ONG.

The points of the slab, projected down the last axis and taken in order of
height, form a sequence whose ONG is edge-by-edge dominated by the MDST on the
slab points.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from mdst_utils.errors import InvalidDimensionError, InvalidInputError, InvalidParameterError
from mdst_utils.geometry import PointCloud, arrival_order, project_drop_last
from mdst_utils.graphs import INDEXED, build_mdst, build_ong

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-12


@dataclass
class CouplingReport:
    """Outcome of comparing the slab MDST with the projected ONG."""
    ong_weight: float
    mdst_weight: float
    per_edge_violations: int
    max_per_edge_excess: float
    beta_n: int
    alpha: float = 1.0
    per_edge_constant: float = 1.0
    total_bound: float = 0.0
    dominates: bool = True

    @property
    def difference(self) -> float:
        return self.mdst_weight - self.ong_weight

    def slab_bound(self, t_n: float) -> float:
        """Aggregate bound on the weight difference: C * beta_n * t_n, or beta_n * t_n**alpha below alpha = 1."""
        if self.alpha >= 1:
            return self.per_edge_constant * self.beta_n * t_n
        return self.beta_n * t_n ** self.alpha

    @property
    def passed(self) -> bool:
        return self.dominates and self.per_edge_violations == 0


def per_edge_constant(d: int, alpha: float) -> float:
    """alpha * (sqrt(d-1) + 1)^(alpha-1) for alpha >= 1; 1 below, where the bound is gap**alpha."""
    if alpha >= 1:
        return alpha * (math.sqrt(d - 1) + 1.0) ** (alpha - 1)
    return 1.0


def extract_boundary_coupling(cloud: PointCloud, t_n: float) -> Tuple[PointCloud, np.ndarray]:
    """
    Split off the base slab of height ``t_n``.

    Returns:
        (W, V): the slab points, in their original order, and their
        projections sorted by ascending last coordinate
    """
    if cloud.dim < 2:
        raise InvalidDimensionError("Boundary coupling needs dimension at least 2")
    if not t_n > 0:
        raise InvalidParameterError(f"Slab height must be positive, got {t_n}")
    slab = cloud.subset(cloud.heights <= t_n)
    return slab, project_drop_last(slab)


def verify_coupling_bounds(slab: PointCloud, projected, alpha: float,
                           strategy: str = INDEXED) -> CouplingReport:
    """
    Check the coupling inequalities on one slab.

    The ONG weight of the projection must not exceed the MDST weight of the
    slab. Edge by edge, with D(i) the ONG target of the i-th point, the MDST
    weight minus the ONG weight is at most C * (height_i - height_D(i)) for
    alpha >= 1, and at most (height_i - height_D(i))**alpha for alpha < 1.
    """
    if not alpha > 0:
        raise InvalidParameterError(f"Exponent alpha must be positive, got {alpha}")
    projected = np.asarray(projected, dtype=np.float64)
    beta = len(slab)
    if len(projected) != beta:
        raise InvalidInputError(f"Slab has {beta} points but the projected sequence has {len(projected)}")
    constant = per_edge_constant(slab.dim, alpha)
    if beta == 0:
        return CouplingReport(0.0, 0.0, 0, 0.0, 0, alpha=alpha, per_edge_constant=constant)
    projected = projected.reshape(beta, -1)
    if not np.array_equal(projected, project_drop_last(slab)):
        raise InvalidInputError("Projected sequence is not the projection of the slab points")

    mdst = build_mdst(slab, strategy)
    ong = build_ong(projected, strategy)

    order = arrival_order(slab)
    heights = slab.heights[order]
    rank = np.empty(beta, dtype=np.int64)
    rank[order] = np.arange(beta)

    # align edges by arrival position; ONG sources are positions 1..beta-1
    positions = rank[mdst.sources]
    mdst_w = np.zeros(beta)
    mdst_w[positions] = mdst.lengths ** alpha
    ong_w = np.zeros(beta)
    ong_w[ong.sources] = ong.lengths ** alpha
    gaps = np.zeros(beta)
    gaps[ong.sources] = heights[ong.sources] - heights[ong.targets]

    bounds = constant * gaps if alpha >= 1 else gaps ** alpha
    excess = (mdst_w - ong_w) - bounds
    tolerance = RELATIVE_SLACK * np.maximum(1.0, mdst_w)
    violations = int(np.count_nonzero(excess > tolerance))

    mdst_weight = math.fsum(mdst_w.tolist())
    ong_weight = math.fsum(ong_w.tolist())
    dominates = ong_weight <= mdst_weight + RELATIVE_SLACK * max(1.0, mdst_weight)
    if violations or not dominates:
        logger.warning("Coupling bound violated: %d per-edge violations, ONG %.6g vs MDST %.6g",
                       violations, ong_weight, mdst_weight)
    return CouplingReport(
        ong_weight=ong_weight,
        mdst_weight=mdst_weight,
        per_edge_violations=violations,
        max_per_edge_excess=max(float(excess.max()), 0.0),
        beta_n=beta,
        alpha=alpha,
        per_edge_constant=constant,
        total_bound=math.fsum(bounds.tolist()),
        dominates=dominates,
    )


def suffix_ong_in_degrees(projected) -> np.ndarray:
    """
    In-degree of the first point of the ONG on each suffix of ``projected``.

    Entry j counts the k > j whose nearest point among positions j..k-1 is j
    (ties go to the earliest position).
    """
    seq = np.asarray(projected, dtype=np.float64)
    if seq.ndim == 1:
        seq = seq.reshape(-1, 1)
    m = len(seq)
    degrees = np.zeros(m, dtype=np.int64)
    for k in range(1, m):
        dist = np.sqrt(np.sum((seq[:k] - seq[k]) ** 2, axis=1))
        suffix_min = np.minimum.accumulate(dist[::-1])[::-1]
        chosen = np.empty(k, dtype=bool)
        chosen[:-1] = dist[:-1] <= suffix_min[1:]
        chosen[-1] = True
        degrees[:k] += chosen
    return degrees


def check_degree_domination(cloud: PointCloud, strategy: str = INDEXED) -> List[int]:
    """
    Arrival positions j where the MDST in-degree of the j-th lowest point
    exceeds the in-degree of its projection in the ONG on the projected suffix.
    """
    if cloud.dim < 2:
        raise InvalidDimensionError("Degree domination needs dimension at least 2")
    if len(cloud) == 0:
        return []
    mdst = build_mdst(cloud, strategy)
    order = arrival_order(cloud)
    mdst_degrees = np.bincount(mdst.targets, minlength=len(cloud))[order]
    bound = suffix_ong_in_degrees(project_drop_last(cloud))
    return np.flatnonzero(mdst_degrees > bound).tolist()
