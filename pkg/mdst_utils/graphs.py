"""
Minimal directed spanning trees and on-line nearest-neighbour graphs.

Both graphs join every point to its Euclidean nearest neighbour among the
points that precede it: by last coordinate for the MDST, by arrival order
for the ONG. One engine, ``nearest_predecessors``, serves both.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from mdst_utils.errors import EmptySampleError, InvalidInputError, InvalidParameterError
from mdst_utils.geometry import PointCloud, Region, arrival_order
from mdst_utils.grid_index import UniformGrid, pair_distances

logger = logging.getLogger(__name__)

MDST = 'MDST'
ONG = 'ONG'

BRUTE = 'brute'
INDEXED = 'indexed'
STRATEGIES = (BRUTE, INDEXED)


@dataclass(frozen=True)
class DirectedEdge:
    source: int
    target: int
    length: float


@dataclass
class DirectedGraph:
    """
    Edge list of an MDST or ONG.

    Edges are stored as parallel arrays sorted by source index.
    """
    kind: str
    num_vertices: int
    sources: np.ndarray
    targets: np.ndarray
    lengths: np.ndarray

    @classmethod
    def empty(cls, kind: str, num_vertices: int = 0) -> 'DirectedGraph':
        return cls(kind, num_vertices, np.empty(0, dtype=np.int64),
                   np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    @property
    def edge_count(self) -> int:
        return len(self.sources)

    @property
    def edges(self) -> List[DirectedEdge]:
        return [DirectedEdge(int(s), int(t), float(w))
                for s, t, w in zip(self.sources, self.targets, self.lengths)]

    def same_edges(self, other: 'DirectedGraph') -> bool:
        """Edge-for-edge equality, lengths compared exactly."""
        return (self.num_vertices == other.num_vertices
                and np.array_equal(self.sources, other.sources)
                and np.array_equal(self.targets, other.targets)
                and np.array_equal(self.lengths, other.lengths))


def _check_strategy(strategy: str) -> None:
    if strategy not in STRATEGIES:
        raise InvalidParameterError(f"Unknown strategy '{strategy}', expected one of {STRATEGIES}")


def nearest_predecessors(points: np.ndarray, labels: Sequence[int],
                         strategy: str = INDEXED) -> Tuple[np.ndarray, np.ndarray]:
    """
    For each position i, find the nearest of the points at positions 0..i-1.

    Args:
        points: (m, k) array in processing order
        labels: Tie-break keys (original point indices), one per position
        strategy: 'brute' for the O(m^2) scan, 'indexed' for the grid index
            (rows the grid leaves unresolved fall back to the scan)

    Returns:
        (targets, lengths): label of the chosen predecessor and the distance;
        position 0 gets target -1 and length 0
    """
    _check_strategy(strategy)
    pts = np.asarray(points, dtype=np.float64)
    m = len(pts)
    targets = np.full(m, -1, dtype=np.int64)
    lengths = np.zeros(m, dtype=np.float64)
    if m == 0:
        return targets, lengths
    labels = np.fromiter((int(x) for x in labels), dtype=np.int64, count=m)

    if strategy == BRUTE:
        for i in range(1, m):
            targets[i], lengths[i] = _scan_earlier(pts, labels, i)
        return targets, lengths

    positions = np.arange(1, m)
    found, dist, resolved = UniformGrid(pts).nearest_earlier(positions, labels)
    targets[1:] = found
    lengths[1:] = dist
    for i in positions[~resolved].tolist():
        targets[i], lengths[i] = _scan_earlier(pts, labels, i)
    return targets, lengths


def _scan_earlier(pts: np.ndarray, labels: np.ndarray, i: int) -> Tuple[int, float]:
    """Exact nearest of positions 0..i-1 to position i, smallest label on ties."""
    dist = pair_distances(pts[i], pts[:i])
    best = dist.min()
    return int(labels[:i][dist == best].min()), float(best)


def _as_sequence(sequence) -> np.ndarray:
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.ndim == 1:
        seq = seq.reshape(-1, 1)
    if seq.ndim != 2:
        raise InvalidInputError(f"Expected a sequence of points, got shape {seq.shape}")
    return seq


def build_mdst(cloud: PointCloud, strategy: str = INDEXED) -> DirectedGraph:
    """
    Minimal directed spanning tree under the South order.

    Each point except the sink is joined to its nearest neighbour among the
    points with smaller last coordinate; ties go to the lowest point index.
    """
    _check_strategy(strategy)
    n = len(cloud)
    if n == 0:
        return DirectedGraph.empty(MDST)
    if not cloud.has_distinct_heights():
        raise InvalidInputError("Last coordinates must be distinct to build an MDST")
    order = arrival_order(cloud)
    targets, lengths = nearest_predecessors(cloud.coords[order], order, strategy)
    sources = order[1:]
    by_source = np.argsort(sources, kind='stable')
    return DirectedGraph(MDST, n, sources[by_source].astype(np.int64),
                         targets[1:][by_source], lengths[1:][by_source])


def build_ong(sequence, strategy: str = INDEXED) -> DirectedGraph:
    """
    On-line nearest-neighbour graph on an ordered sequence of points.

    A 1-d array is read as a sequence of scalars.
    """
    seq = _as_sequence(sequence)
    m = len(seq)
    if m == 0:
        return DirectedGraph.empty(ONG)
    targets, lengths = nearest_predecessors(seq, range(m), strategy)
    return DirectedGraph(ONG, m, np.arange(1, m, dtype=np.int64), targets[1:], lengths[1:])


def edge_weights(graph: DirectedGraph, alpha: float) -> np.ndarray:
    """Per-edge power-weighted lengths, length**alpha."""
    if not alpha > 0:
        raise InvalidParameterError(f"Exponent alpha must be positive, got {alpha}")
    return graph.lengths ** alpha


def total_weight(graph: DirectedGraph, alpha: float, cloud: Optional[PointCloud] = None,
                 region: Optional[Region] = None) -> float:
    """
    Sum of length**alpha over edges, optionally only those whose source lies in ``region``.
    """
    weights = edge_weights(graph, alpha)
    if region is not None:
        if cloud is None:
            raise InvalidInputError("A region restriction needs the cloud the graph was built on")
        weights = weights[region.contains(cloud.coords)[graph.sources]]
    return math.fsum(weights.tolist())


def max_edge_length(graph: DirectedGraph) -> float:
    if graph.edge_count == 0:
        return 0.0
    return float(graph.lengths.max())


def in_degrees(graph: DirectedGraph) -> List[int]:
    return np.bincount(graph.targets, minlength=graph.num_vertices).tolist()


def sink(graph: DirectedGraph) -> Optional[int]:
    """The unique vertex without an outgoing edge, or None for the empty graph."""
    if graph.num_vertices == 0:
        return None
    has_out = np.zeros(graph.num_vertices, dtype=bool)
    has_out[graph.sources] = True
    roots = np.flatnonzero(~has_out)
    return int(roots[0]) if len(roots) == 1 else None


def is_spanning_tree(graph: DirectedGraph) -> bool:
    """True when the undirected graph is connected and acyclic."""
    n = graph.num_vertices
    if graph.edge_count != max(n - 1, 0):
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, t in zip(graph.sources.tolist(), graph.targets.tolist()):
        rs, rt = find(s), find(t)
        if rs == rt:
            return False
        parent[rs] = rt
    return True


def upper_records(values: Iterable[float]) -> List[Tuple[int, float]]:
    """Indices and values of entries strictly larger than everything before them."""
    records = []
    best = -math.inf
    for i, value in enumerate(values):
        if value > best:
            records.append((i, value))
            best = value
    if not records:
        raise EmptySampleError("Record values need a nonempty sequence")
    return records


def ong_max_1d_via_records(values: Sequence[float]) -> float:
    """
    Longest edge of the 1-d ONG on (0, values...) computed from record gaps.

    Only an upper record can open a new longest gap, so the result is the
    largest difference between consecutive records, starting from 0.
    """
    longest = 0.0
    previous = 0.0
    for _, value in upper_records(values):
        longest = max(longest, value - previous)
        previous = value
    return longest


def ong_longest_edge_1d(values: Sequence[float], strategy: str = INDEXED) -> float:
    """Longest edge of the ONG built directly on the 0-prefixed sequence."""
    return max_edge_length(build_ong(np.concatenate(([0.0], np.asarray(values, dtype=np.float64))), strategy))


def ong_prefix_longest_edges(sequence, checkpoints: Sequence[int],
                             strategy: str = INDEXED) -> List[float]:
    """Longest ONG edge of each prefix, each prefix graph built from scratch."""
    seq = _as_sequence(sequence)
    return [max_edge_length(build_ong(seq[:k], strategy)) for k in checkpoints]
