"""
Property suite: exact invariants of the graph builders and constants,
checked on seeded random instances.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from mdst_utils.coupling import check_degree_domination, extract_boundary_coupling, verify_coupling_bounds
from mdst_utils.geometry import Region, arrival_order, sample_binomial_cloud, sample_poisson_cloud, unit_ball_volume
from mdst_utils.graphs import (BRUTE, INDEXED, build_mdst, build_ong, is_spanning_tree, ong_longest_edge_1d,
                               ong_max_1d_via_records, ong_prefix_longest_edges, sink, total_weight)
from mdst_utils.limit_laws import lln_constant, lln_constant_quadrature, ong_weight_variances
from mdst_utils.rng import replicate_rng, replicate_seed

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: int
    detail: str = ''

    def as_row(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class SuiteSize:
    """How many random instances each check draws."""
    oracle_instances: int
    oracle_max_points: int
    record_sequences: int
    coupling_replicates: int
    coupling_points: int
    clouds: int
    variance_sizes: Tuple[int, ...]
    variance_replicates: int


QUICK = SuiteSize(oracle_instances=20, oracle_max_points=500, record_sequences=1000,
                  coupling_replicates=20, coupling_points=500, clouds=5,
                  variance_sizes=(50, 150, 500), variance_replicates=150)
FULL = SuiteSize(oracle_instances=200, oracle_max_points=500, record_sequences=10000,
                 coupling_replicates=1000, coupling_points=10000, clouds=20,
                 variance_sizes=(100, 1000, 10000), variance_replicates=300)


VARIANCE_SPREAD = 2.5
BOUNDED_VARIANCE_CASES: List[Tuple[int, float]] = [(1, 1.5), (2, 1.5)]


def _result(name: str, cases: int, failures: int, detail: str = '') -> CheckResult:
    return CheckResult(name, failures == 0, cases, failures, detail)


def check_mdst_oracle(size: SuiteSize, seed: int) -> CheckResult:
    rng = replicate_rng(seed, 1)
    failures = 0
    for i in range(size.oracle_instances):
        n = int(rng.integers(1, size.oracle_max_points + 1))
        d = 2 + i % 2
        cloud = sample_binomial_cloud(n, d, replicate_seed(seed, 1, i))
        if not build_mdst(cloud, INDEXED).same_edges(build_mdst(cloud, BRUTE)):
            failures += 1
    return _result('mdst_oracle_equivalence', size.oracle_instances, failures)


def check_ong_oracle(size: SuiteSize, seed: int) -> CheckResult:
    rng = replicate_rng(seed, 2)
    failures = 0
    for i in range(size.oracle_instances):
        m = int(rng.integers(1, size.oracle_max_points + 1))
        dim = 1 + i % 2
        points = sample_binomial_cloud(m, dim, replicate_seed(seed, 2, i)).coords
        if not build_ong(points, INDEXED).same_edges(build_ong(points, BRUTE)):
            failures += 1
    return _result('ong_oracle_equivalence', size.oracle_instances, failures)


def check_tree_structure(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    for i in range(size.clouds):
        cloud = sample_poisson_cloud(200, 2 + i % 2, replicate_seed(seed, 3, i))
        graph = build_mdst(cloud)
        heights = cloud.heights
        ok = (is_spanning_tree(graph)
              and graph.edge_count == max(len(cloud) - 1, 0)
              and bool(np.all(heights[graph.targets] < heights[graph.sources])))
        if len(cloud):
            ok = ok and sink(graph) == int(arrival_order(cloud)[0])
        failures += not ok
    return _result('mdst_tree_structure', size.clouds, failures)


def check_record_identity(size: SuiteSize, seed: int) -> CheckResult:
    rng = replicate_rng(seed, 4)
    failures = 0
    for _ in range(size.record_sequences):
        values = 1.0 - rng.random(100)
        if ong_max_1d_via_records(values) != ong_longest_edge_1d(values):
            failures += 1
    return _result('record_identity', size.record_sequences, failures)


def check_decomposition(size: SuiteSize, seed: int, epsilon: float = 0.05) -> CheckResult:
    failures = 0
    worst = 0.0
    for i in range(size.clouds):
        n = 500.0
        d = 2 + i % 2
        cloud = sample_poisson_cloud(n, d, replicate_seed(seed, 5, i))
        graph = build_mdst(cloud)
        g_n = n ** (epsilon - 1.0 / d)
        t_n = n ** (-0.5 - epsilon)
        full = total_weight(graph, 1.0)
        parts = math.fsum(total_weight(graph, 1.0, cloud, region) for region in (
            Region.gamma(d, g_n), Region.boundary(d, t_n), Region.intermediate(d, t_n, g_n)))
        error = abs(full - parts) / full if full else abs(parts)
        worst = max(worst, error)
        failures += error >= 1e-10
    return _result('decomposition_identity', size.clouds, failures, f'max relative error {worst:.3g}')


def check_coupling(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    cases = 0
    n = size.coupling_points
    for d in (2, 3):
        t_n = n ** (-0.5 - 0.05)
        for alpha in (0.5, 1.0, 2.0):
            for rep in range(size.coupling_replicates):
                cloud = sample_poisson_cloud(n, d, replicate_seed(seed, 6, d, rep))
                slab, projected = extract_boundary_coupling(cloud, t_n)
                report = verify_coupling_bounds(slab, projected, alpha)
                cases += 1
                failures += not report.passed
    return _result('coupling_bounds', cases, failures)


def check_degree_domination_suite(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    for i in range(size.clouds):
        cloud = sample_binomial_cloud(200, 2 + i % 2, replicate_seed(seed, 7, i))
        failures += bool(check_degree_domination(cloud))
    return _result('degree_domination', size.clouds, failures)


def check_longest_edge_monotone(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    for i in range(size.clouds):
        points = sample_binomial_cloud(150, 1 + i % 2, replicate_seed(seed, 8, i)).coords
        prefixes = ong_prefix_longest_edges(points, range(1, len(points) + 1))
        failures += any(b < a for a, b in zip(prefixes, prefixes[1:]))
    return _result('ong_longest_edge_monotone', size.clouds, failures)


def check_scale_and_translation(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    scale = 0.37
    for i in range(size.clouds):
        d = 2 + i % 2
        cloud = sample_binomial_cloud(300, d, replicate_seed(seed, 9, i))
        graph = build_mdst(cloud)
        scaled = build_mdst(cloud.transformed(scale=scale))
        shifted = build_mdst(cloud.transformed(shift=[0.25] * d))
        for alpha in (0.5, 1.0, 2.5):
            expected = scale ** alpha * total_weight(graph, alpha)
            if abs(total_weight(scaled, alpha) - expected) > 1e-10 * expected:
                failures += 1
                break
        else:
            same_index_set = (np.array_equal(graph.sources, scaled.sources)
                              and np.array_equal(graph.targets, scaled.targets)
                              and np.array_equal(graph.sources, shifted.sources)
                              and np.array_equal(graph.targets, shifted.targets))
            failures += not same_index_set
    return _result('scale_and_translation', size.clouds, failures)


def check_unit_ball_recursion(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    for d in range(3, 21):
        expected = unit_ball_volume(d - 2) * 2 * math.pi / d
        failures += abs(unit_ball_volume(d) - expected) > 1e-12 * expected
    return _result('unit_ball_recursion', 18, failures)


def check_lln_quadrature(size: SuiteSize, seed: int) -> CheckResult:
    failures = 0
    cases: List[Tuple[int, float]] = [(2, 0.5), (2, 1.0), (2, 1.5), (3, 1.0), (3, 2.0), (4, 3.0)]
    for d, alpha in cases:
        closed = lln_constant(d, alpha)
        value, _ = lln_constant_quadrature(d, alpha)
        failures += abs(value - closed) > 1e-8 * closed
    return _result('lln_quadrature', len(cases), failures)


def check_ong_variance_bounded(size: SuiteSize, seed: int) -> CheckResult:
    """
    Above alpha = dim/2 the ONG weight variance settles to a finite limit, so
    across the suite's point counts it may not spread by more than
    VARIANCE_SPREAD.
    """
    failures = 0
    spreads = []
    for i, (dim, alpha) in enumerate(BOUNDED_VARIANCE_CASES):
        variances = ong_weight_variances(dim, alpha, size.variance_sizes, size.variance_replicates,
                                         replicate_seed(seed, 10, i))
        spread = max(variances.values()) / min(variances.values())
        spreads.append(f'd={dim} alpha={alpha}: {spread:.2f}')
        failures += spread > VARIANCE_SPREAD
    return _result('ong_variance_bounded', len(BOUNDED_VARIANCE_CASES), failures, '; '.join(spreads))


CHECKS: List[Callable[[SuiteSize, int], CheckResult]] = [
    check_mdst_oracle,
    check_ong_oracle,
    check_tree_structure,
    check_record_identity,
    check_decomposition,
    check_coupling,
    check_degree_domination_suite,
    check_longest_edge_monotone,
    check_scale_and_translation,
    check_unit_ball_recursion,
    check_lln_quadrature,
    check_ong_variance_bounded,
]


def run_property_suite(quick: bool = False, seed: int = 0) -> List[CheckResult]:
    """Run every check; ``quick`` keeps instances at n <= 500."""
    size = QUICK if quick else FULL
    results = []
    for check in CHECKS:
        result = check(size, seed)
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, "%s: %d/%d failures", result.name, result.failures, result.cases)
        results.append(result)
    return results
