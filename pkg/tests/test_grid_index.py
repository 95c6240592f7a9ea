"""Tests for the uniform grid index."""
import math

import numpy as np
import pytest

from mdst_utils.errors import InvalidDimensionError, InvalidInputError, InvalidParameterError
from mdst_utils.grid_index import (
    MAX_RING_CELLS,
    UniformGrid,
    default_cell_side,
    pair_distances,
    ring_limit,
    ring_offsets,
)


class TestDefaultCellSide:

    def test_one_point_per_cell(self):
        """A hundred points in the unit square get cells of side 0.1."""
        assert default_cell_side(1.0, 100, 2) == pytest.approx(0.1)

    def test_zero_extent(self):
        """A degenerate extent falls back to unit cells."""
        assert default_cell_side(0.0, 1, 2) == pytest.approx(1.0)


class TestRings:

    @pytest.mark.parametrize('dim,r,expected', [(2, 0, 1), (2, 1, 8), (2, 2, 16), (3, 1, 26), (1, 4, 2)])
    def test_ring_sizes(self, dim, r, expected):
        """Each ring holds the cells of the cube shell at that Chebyshev radius."""
        offsets = ring_offsets(dim, r)
        assert offsets.shape == (expected, dim)
        assert np.all(np.abs(offsets).max(axis=1) == r)

    @pytest.mark.parametrize('dim', [1, 2, 3, 4, 5])
    def test_ring_limit_respects_cell_budget(self, dim):
        """The last searched cube fits the budget and the next one does not."""
        r = ring_limit(dim)
        assert (2 * r + 1) ** dim <= MAX_RING_CELLS < (2 * r + 3) ** dim


class TestUniformGrid:
    """Tests for nearest-earlier queries."""

    def test_empty_grid(self):
        """No points means no answers."""
        grid = UniformGrid(np.empty((0, 2)))
        found, dist, resolved = grid.nearest_earlier(np.empty(0, dtype=np.int64), np.empty(0))
        assert len(found) == len(dist) == len(resolved) == 0

    def test_tie_goes_to_smallest_label(self):
        """Two equidistant earlier points resolve to the smaller label."""
        grid = UniformGrid(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]), cell_side=0.5)
        found, dist, resolved = grid.nearest_earlier([2], np.array([5, 3, 9]))
        assert found.tolist() == [3]
        assert dist.tolist() == [1.0]
        assert resolved.all()

    def test_later_points_are_invisible(self):
        """A closer point at a later position is never returned."""
        grid = UniformGrid(np.array([[0.0, 0.0], [0.5, 0.0], [0.51, 0.0]]))
        found, _, _ = grid.nearest_earlier([1], np.arange(3))
        assert found.tolist() == [0]

    def test_far_point_beyond_ring_limit(self):
        """A row whose answer lies past the last ring is left unresolved."""
        grid = UniformGrid(np.array([[0.0, 0.0], [0.9, 0.9]]), cell_side=0.01)
        _, _, resolved = grid.nearest_earlier([1], np.arange(2), max_ring=5)
        assert not resolved.any()
        found, dist, resolved = grid.nearest_earlier([1], np.arange(2), max_ring=200)
        assert resolved.all()
        assert found.tolist() == [0]
        assert dist[0] == pytest.approx(math.hypot(0.9, 0.9))

    @pytest.mark.parametrize('dim', [1, 2, 3])
    def test_matches_scan(self, dim):
        """Every answer equals an exhaustive scan, lengths bit for bit."""
        rng = np.random.default_rng(dim)
        points = rng.random((300, dim))
        grid = UniformGrid(points)
        positions = np.arange(1, 300)
        found, dist, resolved = grid.nearest_earlier(positions, np.arange(300))
        assert resolved.all()
        for i in positions:
            scan = pair_distances(points[i], points[:i])
            assert dist[i - 1] == scan.min()
            assert found[i - 1] == int(np.flatnonzero(scan == scan.min())[0])

    def test_invalid_construction(self):
        """Bad cell sides, dimensions and shapes are rejected."""
        with pytest.raises(InvalidParameterError):
            UniformGrid(np.zeros((2, 2)), cell_side=0.0)
        with pytest.raises(InvalidDimensionError):
            UniformGrid(np.zeros((3, 0)))
        with pytest.raises(InvalidInputError):
            UniformGrid(np.zeros(3))
