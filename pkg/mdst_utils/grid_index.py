"""
Uniform-grid index for directed nearest-neighbour queries.

Points are bucketed once into a compressed layout: the positions sorted by
cell, plus one offset per occupied cell. A query for position i only accepts
candidates at positions below i, which gives the same answers as inserting
the points one at a time and querying each before its insertion. Queries are
answered in batches, one expanding ring of cells at a time.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from mdst_utils.errors import InvalidDimensionError, InvalidInputError, InvalidParameterError

logger = logging.getLogger(__name__)

MAX_RING_CELLS = 4096
_PAIR_BLOCK = 1 << 17
_ROUNDING = 1e-9


def default_cell_side(extent: float, count: int, dim: int) -> float:
    """Cell side giving about one point per cell."""
    extent = extent if extent > 0 else 1.0
    return extent * max(int(count), 1) ** (-1.0 / dim)


def pair_distances(queries: np.ndarray, others: np.ndarray) -> np.ndarray:
    """
    Euclidean distances along the last axis.

    Every strategy measures lengths through this function so that equal
    pairs give bit-identical lengths.
    """
    return np.sqrt(np.square(others - queries).sum(axis=-1))


def ring_offsets(dim: int, r: int) -> np.ndarray:
    """Integer cell offsets at Chebyshev distance exactly r, shape (count, dim)."""
    if r == 0:
        return np.zeros((1, dim), dtype=np.int64)
    axis = np.arange(-r, r + 1, dtype=np.int64)
    cube = np.stack(np.meshgrid(*([axis] * dim), indexing='ij'), axis=-1).reshape(-1, dim)
    return cube[np.abs(cube).max(axis=1) == r]


def ring_limit(dim: int) -> int:
    """Largest ring whose enclosing cube has at most MAX_RING_CELLS cells."""
    r = 0
    while (2 * r + 3) ** dim <= MAX_RING_CELLS:
        r += 1
    return r


class UniformGrid:
    """
    Static uniform grid over a fixed sequence of points.

    Ties in distance are resolved in favour of the smallest label.
    """

    def __init__(self, points: np.ndarray, cell_side: Optional[float] = None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise InvalidInputError(f"Expected an (m, dim) array of points, got shape {pts.shape}")
        if pts.shape[1] < 1:
            raise InvalidDimensionError("Grid dimension must be positive, got 0")
        self.points = pts
        self.count, self.dim = pts.shape
        self.lower = pts.min(axis=0) if self.count else np.zeros(self.dim)
        extent = float(np.max(pts.max(axis=0) - self.lower)) if self.count else 1.0
        side = default_cell_side(extent, self.count, self.dim) if cell_side is None else cell_side
        if not side > 0:
            raise InvalidParameterError(f"Cell side must be positive, got {side}")
        self.side = float(side)

        self.cells = np.floor((pts - self.lower) / self.side).astype(np.int64)
        self.shape = (self.cells.max(axis=0) + 1 if self.count
                      else np.ones(self.dim, dtype=np.int64))
        total_cells = 1
        for extent_cells in self.shape.tolist():
            total_cells *= extent_cells
        if total_cells >= 2 ** 62:
            raise InvalidParameterError(f"Cell side {self.side} is too small for the point extent")
        self.strides = np.ones(self.dim, dtype=np.int64)
        for k in range(self.dim - 2, -1, -1):
            self.strides[k] = self.strides[k + 1] * self.shape[k + 1]

        ids = self.cells @ self.strides
        self.order = np.argsort(ids, kind='stable')
        self.cell_ids, counts = np.unique(ids, return_counts=True)
        self.cell_start = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

    def nearest_earlier(self, positions: np.ndarray, labels: np.ndarray,
                        max_ring: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Nearest point at a lower position, for every query position.

        Args:
            positions: Query positions into the grid's point sequence
            labels: Tie-break key for every position of the sequence
            max_ring: Last ring searched; defaults to ``ring_limit(dim)``

        Returns:
            (labels, distances, resolved); rows not resolved within ``max_ring``
            carry the best candidate seen so far and must be finished by a scan
        """
        positions = np.asarray(positions, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        q = len(positions)
        best_dist = np.full(q, np.inf)
        best_label = np.full(q, -1, dtype=np.int64)
        resolved = np.zeros(q, dtype=bool)
        if q == 0 or self.count == 0:
            return best_label, best_dist, resolved
        if max_ring is None:
            max_ring = ring_limit(self.dim)

        cells = self.cells[positions]
        query_pts = self.points[positions]
        cell_lo = self.lower + cells * self.side
        # distance from each query to the nearest face of its own cell
        margin = np.minimum(query_pts - cell_lo, cell_lo + self.side - query_pts).min(axis=1)
        margin = np.maximum(margin - _ROUNDING * self.side, 0.0)
        reach = np.maximum(cells, self.shape - 1 - cells).max(axis=1)

        pending = np.arange(q)
        for r in range(max_ring + 1):
            offsets = ring_offsets(self.dim, r)
            step = max(1, _PAIR_BLOCK // len(offsets))
            for s in range(0, len(pending), step):
                self._scan(pending[s:s + step], positions, cells, offsets, labels,
                           best_dist, best_label)
            done = (best_dist[pending] < r * self.side + margin[pending]) | (reach[pending] <= r)
            resolved[pending[done]] = True
            pending = pending[~done]
            if not pending.size:
                break
        logger.debug("Grid search over %d queries left %d for a scan", q, len(pending))
        return best_label, best_dist, resolved

    def _scan(self, rows: np.ndarray, positions: np.ndarray, cells: np.ndarray,
              offsets: np.ndarray, labels: np.ndarray,
              best_dist: np.ndarray, best_label: np.ndarray) -> None:
        """Fold the candidates of one ring into the running best of ``rows``."""
        neighbour = cells[rows][:, None, :] + offsets[None, :, :]
        inside = np.all((neighbour >= 0) & (neighbour < self.shape), axis=2)
        ids = neighbour @ self.strides
        slot = np.minimum(np.searchsorted(self.cell_ids, ids), len(self.cell_ids) - 1)
        hit = inside & (self.cell_ids[slot] == ids)
        start = np.where(hit, self.cell_start[slot], 0).ravel()
        count = np.where(hit, self.cell_start[slot + 1] - self.cell_start[slot], 0).ravel()
        total = int(count.sum())
        if total == 0:
            return

        owner = np.repeat(np.repeat(rows, len(offsets)), count)
        first = np.repeat(np.cumsum(count) - count, count)
        cand = self.order[np.repeat(start, count) + (np.arange(total) - first)]
        keep = cand < positions[owner]
        owner, cand = owner[keep], cand[keep]
        if not owner.size:
            return

        dist = pair_distances(self.points[positions[owner]], self.points[cand])
        cand_label = labels[cand]
        ranked = np.lexsort((cand_label, dist, owner))
        owner, dist, cand_label = owner[ranked], dist[ranked], cand_label[ranked]
        head = np.flatnonzero(np.r_[True, owner[1:] != owner[:-1]])
        owner, dist, cand_label = owner[head], dist[head], cand_label[head]

        current = best_dist[owner]
        better = (dist < current) | ((dist == current) & (cand_label < best_label[owner]))
        best_dist[owner[better]] = dist[better]
        best_label[owner[better]] = cand_label[better]
