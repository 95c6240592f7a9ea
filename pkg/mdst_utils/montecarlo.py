"""
Seeded Monte Carlo experiments on MDSTs of random point clouds.

Every replicate owns an independent random stream derived from the master
seed, the intensity and the replicate index, so results do not depend on how
replicates are spread over worker processes.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from mdst_utils.config import ExperimentConfig
from mdst_utils.coupling import CouplingReport, extract_boundary_coupling, verify_coupling_bounds
from mdst_utils.dickman import sample_qmax1_batch
from mdst_utils.errors import InvalidDimensionError, InvalidParameterError
from mdst_utils.fixed_point import G, sample_fixed_point_batch
from mdst_utils.geometry import PointCloud, Region, sample_cloud, sample_poisson_cloud
from mdst_utils.graphs import build_mdst, build_ong, max_edge_length, ong_prefix_longest_edges, total_weight
from mdst_utils.rng import replicate_rng, replicate_seed
from mdst_utils.statistics import EmpiricalDistribution, ks_two_sample, normality_diagnostics

logger = logging.getLogger(__name__)

FULL = 'full'
GAMMA = 'gamma'
BOUNDARY = 'boundary'
INTERMEDIATE = 'intermediate'
REGION_MODES = (FULL, GAMMA, BOUNDARY, INTERMEDIATE)

FINITE_N_LABEL = 'finite-n consistency'

# first element of every stream key
_CLOUD_STREAM = 0
_REFERENCE_STREAM = 1
_SURROGATE_STREAM = 2
_LONGEST_SURROGATE_STREAM = 3


class ReplicateRunner:
    """
    Run a task over replicate indices, inline or on a process pool.

    Results always come back ordered by replicate index.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise InvalidParameterError(f"workers must be positive, got {workers}")
        self.workers = workers

    def map(self, task: Callable[[int], object], count: int) -> List:
        if self.workers == 1 or count < 2:
            return [task(rep) for rep in range(count)]
        results: List = [None] * count
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            futures = {executor.submit(task, rep): rep for rep in range(count)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        return results


def scale_factor(n: float, d: int, alpha: float) -> float:
    """n^(alpha/d - 1) below alpha = d, where the total weight grows with n; 1 otherwise."""
    if alpha < d:
        return n ** (alpha / d - 1)
    return 1.0


def cloud_for(config: ExperimentConfig, n: float, replicate: int) -> PointCloud:
    """The point cloud of one replicate; every experiment on the same config sees the same clouds."""
    seed = replicate_seed(config.master_seed, _CLOUD_STREAM, int(round(n)), replicate)
    return sample_cloud(config.process, n, config.d, seed)


def regions_for(config: ExperimentConfig, n: float) -> Dict[str, Region]:
    """
    The four regions at intensity n. They partition the cube on the last axis;
    if a forced boundary height exceeds g_n, the interior starts at the boundary height.
    """
    t_n = config.slab_height(n)
    top = max(t_n, config.gamma_floor(n))
    return {
        FULL: Region.whole(config.d),
        GAMMA: Region.gamma(config.d, min(top, 1.0)),
        BOUNDARY: Region.boundary(config.d, t_n),
        INTERMEDIATE: Region.intermediate(config.d, t_n, top),
    }


@dataclass
class ReplicateWeights:
    """Region-restricted MDST weights of one replicate, unscaled."""
    n: float
    replicate: int
    points: int
    weights: Dict[str, float]
    longest_edge: float

    @property
    def decomposition_error(self) -> float:
        """Relative gap between the full weight and the sum of the three parts."""
        parts = math.fsum(self.weights[m] for m in (GAMMA, BOUNDARY, INTERMEDIATE))
        full = self.weights[FULL]
        return abs(full - parts) / full if full else abs(parts)


def weight_replicate(config: ExperimentConfig, n: float, replicate: int) -> ReplicateWeights:
    cloud = cloud_for(config, n, replicate)
    graph = build_mdst(cloud, config.strategy)
    weights = {mode: total_weight(graph, config.alpha, cloud, region)
               for mode, region in regions_for(config, n).items()}
    return ReplicateWeights(n, replicate, len(cloud), weights, max_edge_length(graph))


@dataclass
class WeightRow:
    n: float
    region: str
    scale: float
    distribution: EmpiricalDistribution
    max_decomposition_error: float

    def as_row(self) -> Dict:
        row = {'n': self.n, 'region': self.region, 'scale': self.scale}
        row.update(self.distribution.summary())
        row['max_decomposition_error'] = self.max_decomposition_error
        return row


def run_weight_experiment(config: ExperimentConfig, region_mode: str = FULL) -> List[WeightRow]:
    """
    For each intensity, the distribution over replicates of the scaled MDST
    weight restricted to ``region_mode``.
    """
    if region_mode not in REGION_MODES:
        raise InvalidParameterError(f"Unknown region '{region_mode}', expected one of {REGION_MODES}")
    config.validate()
    runner = ReplicateRunner(config.workers)
    rows = []
    for n in config.intensity_grid:
        results = runner.map(partial(weight_replicate, config, n), config.replicates)
        scale = scale_factor(n, config.d, config.alpha)
        values = [scale * r.weights[region_mode] for r in results]
        rows.append(WeightRow(n, region_mode, scale, EmpiricalDistribution.from_samples(values),
                              max(r.decomposition_error for r in results)))
        logger.info("n=%s: mean scaled %s weight %.6g", n, region_mode, rows[-1].distribution.mean)
    return rows


def _monotonicity_violations(values: Sequence[float]) -> int:
    return sum(1 for a, b in zip(values, values[1:]) if b < a)


@dataclass
class LongestEdgeReplicate:
    longest_edge: float
    monotonicity_violations: int


def longest_edge_replicate(config: ExperimentConfig, n: float, replicate: int) -> LongestEdgeReplicate:
    cloud = cloud_for(config, n, replicate)
    longest = max_edge_length(build_mdst(cloud, config.strategy))
    _, projected = extract_boundary_coupling(cloud, config.slab_height(n))
    prefixes = ong_prefix_longest_edges(projected, range(1, len(projected) + 1), config.strategy)
    return LongestEdgeReplicate(longest, _monotonicity_violations(prefixes))


@dataclass
class LongestEdgeRow:
    n: float
    distribution: EmpiricalDistribution
    monotonicity_violations: int
    ks_limit: Optional[float] = None
    reference: Optional[str] = None
    label: str = FINITE_N_LABEL

    def as_row(self) -> Dict:
        row = {'n': self.n}
        row.update(self.distribution.summary())
        row['monotonicity_violations'] = self.monotonicity_violations
        row['ks_limit'] = self.ks_limit
        row['reference'] = self.reference
        row['label'] = self.label
        return row


def surrogate_longest_replicate(config: ExperimentConfig, n: float, replicate: int) -> float:
    """Longest ONG edge on a Poisson(n t_n) number of uniform points in (0,1)^(d-1)."""
    seed = replicate_seed(config.master_seed, _LONGEST_SURROGATE_STREAM, int(round(n)), replicate)
    points = sample_poisson_cloud(n * config.slab_height(n), config.d - 1, seed).coords
    return max_edge_length(build_ong(points, config.strategy))


def run_longest_edge_experiment(config: ExperimentConfig) -> List[LongestEdgeRow]:
    """
    Longest MDST edge per intensity, compared with draws of its Q_max(d-1)
    limit. In d = 2 the draws come from the Q_max(1) sampler; above, from the
    longest ONG edge on Poisson(n t_n) uniform points in (0,1)^(d-1) at the
    largest intensity.
    """
    config.validate()
    if config.d < 2:
        raise InvalidDimensionError("The longest-edge experiment needs d >= 2")
    runner = ReplicateRunner(config.workers)
    if config.d == 2:
        reference = sample_qmax1_batch(config.reference_samples,
                                       replicate_rng(config.master_seed, _REFERENCE_STREAM, 0))
        reference_name = 'Q_max(1)'
    else:
        n_ref = config.largest_intensity
        reference = np.asarray(runner.map(partial(surrogate_longest_replicate, config, n_ref),
                                          config.reference_samples))
        reference_name = f'longest ONG edge in d={config.d - 1}'
    rows = []
    for n in config.intensity_grid:
        results = runner.map(partial(longest_edge_replicate, config, n), config.replicates)
        dist = EmpiricalDistribution.from_samples([r.longest_edge for r in results])
        rows.append(LongestEdgeRow(n, dist, sum(r.monotonicity_violations for r in results),
                                   ks_two_sample(dist, reference), reference_name))
    return rows


def phase_replicate(config: ExperimentConfig, n: float, alphas: Sequence[float], replicate: int) -> List[float]:
    graph = build_mdst(cloud_for(config, n, replicate), config.strategy)
    return [total_weight(graph, alpha) for alpha in alphas]


def surrogate_replicate(config: ExperimentConfig, n: float, alphas: Sequence[float], replicate: int) -> List[float]:
    """ONG weights on a Poisson(n t_n) number of uniform points in (0,1)^(d-1)."""
    seed = replicate_seed(config.master_seed, _SURROGATE_STREAM, int(round(n)), replicate)
    points = sample_poisson_cloud(n * config.slab_height(n), config.d - 1, seed).coords
    graph = build_ong(points, config.strategy)
    return [total_weight(graph, alpha) for alpha in alphas]


NORMAL = 'normal'
CRITICAL = 'critical'
BOUNDARY_DRIVEN = 'boundary'


@dataclass
class PhaseReport:
    """
    Finite-n diagnostics of the centred total weight at one exponent.

    ``scaled_variance`` is the empirical variance of n^(alpha/d - 1/2) times
    the weight, an estimate of the normal-limit variance below alpha = d/2.
    """
    alpha: float
    n: float
    regime: str
    replicates: int
    mean: float
    scaled_variance: float
    diagnostics: Dict[str, float]
    ks_limit: Optional[float]
    reference: Optional[str]
    passed: Optional[bool]
    label: str = FINITE_N_LABEL
    centering: str = 'empirical mean over replicates'

    def as_row(self) -> Dict:
        row = {'alpha': self.alpha, 'n': self.n, 'regime': self.regime, 'replicates': self.replicates,
               'mean': self.mean, 'scaled_variance': self.scaled_variance}
        row.update(self.diagnostics)
        row.update({'ks_limit': self.ks_limit, 'reference': self.reference, 'passed': self.passed,
                    'label': self.label, 'centering': self.centering})
        return row


def regime_of(d: int, alpha: float) -> str:
    if alpha < d / 2:
        return NORMAL
    if alpha == d / 2:
        return CRITICAL
    return BOUNDARY_DRIVEN


def run_phase_transition_experiment(config: ExperimentConfig,
                                    alphas: Optional[Sequence[float]] = None) -> List[PhaseReport]:
    """
    Compare centred total weights at the largest intensity with their
    conjectured limits: normal below alpha = d/2, the boundary ONG limit above.
    At alpha = d/2 both diagnostics are reported with no verdict.
    """
    config.validate()
    if config.d < 2:
        raise InvalidDimensionError("The phase-transition experiment needs d >= 2")
    if config.replicates < 3:
        raise InvalidParameterError("The phase-transition experiment needs at least 3 replicates")
    alphas = list(alphas) if alphas else [config.alpha]
    n = config.largest_intensity
    runner = ReplicateRunner(config.workers)
    weights = np.asarray(runner.map(partial(phase_replicate, config, n, alphas), config.replicates))

    limit_alphas = [a for a in alphas if regime_of(config.d, a) != NORMAL]
    references: Dict[float, np.ndarray] = {}
    if limit_alphas and config.d == 2:
        for i, alpha in enumerate(limit_alphas):
            seed = replicate_seed(config.master_seed, _REFERENCE_STREAM, 1, i)
            references[alpha] = sample_fixed_point_batch(G, alpha, config.reference_samples,
                                                         seed, config.coeff_tol).values
    elif limit_alphas:
        surrogate = np.asarray(runner.map(partial(surrogate_replicate, config, n, limit_alphas),
                                          config.reference_samples))
        for i, alpha in enumerate(limit_alphas):
            references[alpha] = surrogate[:, i] - surrogate[:, i].mean()
    reference_name = 'G' if config.d == 2 else f'centred ONG weight in d={config.d - 1}'

    reports = []
    for i, alpha in enumerate(alphas):
        raw = weights[:, i]
        regime = regime_of(config.d, alpha)
        diagnostics = normality_diagnostics(raw)
        ks_limit = None
        if alpha in references:
            ks_limit = ks_two_sample(raw - raw.mean(), references[alpha])
        if regime == NORMAL:
            passed = diagnostics['ks_normal'] < config.tolerances.ks_normal
        elif regime == BOUNDARY_DRIVEN:
            passed = ks_limit < config.tolerances.ks_limit
        else:
            passed = None
        scaled = raw * n ** (alpha / config.d - 0.5)
        reports.append(PhaseReport(
            alpha=alpha, n=n, regime=regime, replicates=len(raw), mean=float(raw.mean()),
            scaled_variance=float(np.var(scaled, ddof=1)), diagnostics=diagnostics,
            ks_limit=ks_limit, reference=reference_name if ks_limit is not None else None,
            passed=passed,
        ))
    return reports


def coupling_replicate(config: ExperimentConfig, n: float, replicate: int) -> CouplingReport:
    cloud = cloud_for(config, n, replicate)
    slab, projected = extract_boundary_coupling(cloud, config.slab_height(n))
    return verify_coupling_bounds(slab, projected, config.alpha, config.strategy)


@dataclass
class CouplingRow:
    n: float
    t_n: float
    replicates: int
    inequality_violations: int
    per_edge_violations: int
    slab_bound_violations: int
    mean_abs_difference: float
    stderr: float
    mean_beta: float
    max_per_edge_excess: float

    def as_row(self) -> Dict:
        return dict(self.__dict__)


@dataclass
class CouplingSummary:
    rows: List[CouplingRow] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(r.inequality_violations + r.per_edge_violations + r.slab_bound_violations
                   for r in self.rows)

    @property
    def decreasing(self) -> bool:
        """Mean absolute difference strictly decreasing along increasing n."""
        means = [r.mean_abs_difference for r in sorted(self.rows, key=lambda r: r.n)]
        return all(b < a for a, b in zip(means, means[1:]))


def coupling_experiment(config: ExperimentConfig) -> CouplingSummary:
    """
    Per intensity, check the slab coupling on every replicate and track how
    |L(W_n) - O(V_n)| shrinks as n grows.
    """
    config.validate()
    if config.d < 2:
        raise InvalidDimensionError("The coupling experiment needs d >= 2")
    runner = ReplicateRunner(config.workers)
    summary = CouplingSummary()
    for n in config.intensity_grid:
        t_n = config.slab_height(n)
        reports = runner.map(partial(coupling_replicate, config, n), config.replicates)
        diffs = np.array([abs(r.difference) for r in reports])
        summary.rows.append(CouplingRow(
            n=n,
            t_n=t_n,
            replicates=len(reports),
            inequality_violations=sum(not r.dominates for r in reports),
            per_edge_violations=sum(r.per_edge_violations for r in reports),
            slab_bound_violations=sum(
                r.difference > r.slab_bound(t_n) * (1 + 1e-12) for r in reports),
            mean_abs_difference=float(diffs.mean()),
            stderr=float(diffs.std(ddof=1) / math.sqrt(len(diffs))) if len(diffs) > 1 else 0.0,
            mean_beta=float(np.mean([r.beta_n for r in reports])),
            max_per_edge_excess=max(r.max_per_edge_excess for r in reports),
        ))
    return summary
