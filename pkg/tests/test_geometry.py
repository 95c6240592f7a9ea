"""Tests for mdst_utils.geometry and mdst_utils.rng."""
import math

import numpy as np
import pytest

from mdst_utils.errors import InvalidDimensionError, InvalidParameterError
from mdst_utils.geometry import (BINOMIAL, POISSON, PointCloud, Region, arrival_order,
                                 project_drop_last, sample_binomial_cloud, sample_cloud,
                                 sample_poisson_cloud, unit_ball_volume)
from mdst_utils.rng import keyed_uniforms, replicate_rng, replicate_seed, sample_keys


class TestUnitBallVolume:
    """Tests for unit_ball_volume."""

    def test_low_dimensions(self):
        """Volumes of the unit ball in d = 1, 2, 3."""
        assert unit_ball_volume(1) == pytest.approx(2.0)
        assert unit_ball_volume(2) == pytest.approx(math.pi)
        assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)

    def test_recursion(self):
        """v_d = v_(d-2) * 2 pi / d."""
        for d in range(3, 21):
            assert unit_ball_volume(d) == pytest.approx(unit_ball_volume(d - 2) * 2 * math.pi / d, rel=1e-12)

    def test_zero_dimension_rejected(self):
        """Dimension zero is rejected."""
        with pytest.raises(InvalidDimensionError):
            unit_ball_volume(0)


class TestPointCloud:
    """Tests for the PointCloud container."""

    def test_from_points(self):
        """A cloud built from tuples keeps dimension and heights."""
        cloud = PointCloud.from_points([(0.2, 0.9), (0.7, 0.1)])
        assert cloud.dim == 2
        assert len(cloud) == 2
        assert cloud.heights.tolist() == [0.9, 0.1]
        assert cloud.seed is None

    def test_coordinates_are_the_only_point_view(self):
        """Points are read through the coords array; there is no list-of-tuples copy."""
        cloud = PointCloud.from_points([(0.2, 0.9), (0.7, 0.1)])
        assert isinstance(cloud.coords, np.ndarray)
        assert cloud.coords.shape == (2, 2)
        assert not hasattr(cloud, 'points')

    def test_empty_cloud_keeps_dimension(self):
        """An empty cloud still knows its dimension."""
        cloud = PointCloud.from_points([], dim=3)
        assert len(cloud) == 0
        assert cloud.dim == 3

    def test_rejects_flat_array(self):
        """A 1-d array is not a cloud."""
        with pytest.raises(InvalidDimensionError):
            PointCloud(np.array([0.1, 0.2]))

    def test_transformed(self):
        """Scaling happens before shifting."""
        cloud = PointCloud.from_points([(0.2, 0.4)])
        moved = cloud.transformed(scale=0.5, shift=[1.0, 2.0])
        assert np.allclose(moved.coords, [[1.1, 2.2]])

    def test_distinct_heights(self):
        """Equal last coordinates are detected."""
        assert PointCloud.from_points([(0.1, 0.5), (0.2, 0.6)]).has_distinct_heights()
        assert not PointCloud.from_points([(0.1, 0.5), (0.2, 0.5)]).has_distinct_heights()


class TestSampling:
    """Tests for the point-process samplers."""

    def test_single_binomial_point(self):
        """A binomial cloud of one point."""
        cloud = sample_binomial_cloud(1, 2, seed=3)
        assert len(cloud) == 1

    def test_binomial_points_in_open_cube(self):
        """Binomial points lie in the open cube and record their seed."""
        cloud = sample_binomial_cloud(50, 2, seed=3)
        assert len(cloud) == 50
        assert np.all(cloud.coords > 0) and np.all(cloud.coords < 1)
        assert cloud.process == BINOMIAL
        assert cloud.seed == 3
        assert cloud.has_distinct_heights()

    def test_one_dimensional_spacings_telescope(self):
        """Spacings of sorted 1-d points sum to the range."""
        cloud = sample_binomial_cloud(10000, 1, seed=5)
        values = np.sort(cloud.coords[:, 0])
        assert math.fsum(np.diff(values).tolist()) == pytest.approx(values[-1] - values[0], abs=1e-12)

    def test_reproducible(self):
        """The same seed draws the same cloud and a new seed a different one."""
        a = sample_poisson_cloud(500, 3, seed=11)
        b = sample_poisson_cloud(500, 3, seed=11)
        assert np.array_equal(a.coords, b.coords)
        assert not np.array_equal(a.coords, sample_poisson_cloud(500, 3, seed=12).coords)

    def test_poisson_counts(self):
        """Mean and variance of the point count are both close to the intensity."""
        counts = np.array([len(sample_poisson_cloud(1000, 2, replicate_seed(7, rep))) for rep in range(2000)])
        stderr = math.sqrt(1000 / len(counts))
        assert abs(counts.mean() - 1000) < 4 * stderr
        assert counts.var(ddof=1) == pytest.approx(1000, rel=0.15)

    def test_poisson_records_provenance(self):
        """Poisson clouds record their process and intensity."""
        cloud = sample_poisson_cloud(100, 2, seed=1)
        assert cloud.process == POISSON
        assert cloud.intensity == 100.0

    def test_accepts_generator(self):
        """A Generator can stand in for a seed."""
        cloud = sample_binomial_cloud(10, 2, replicate_rng(0, 1))
        assert cloud.seed is None
        assert len(cloud) == 10

    def test_invalid_parameters(self):
        """Non-positive sizes, dimension zero and unknown processes are rejected."""
        with pytest.raises(InvalidParameterError):
            sample_poisson_cloud(0, 2, seed=1)
        with pytest.raises(InvalidParameterError):
            sample_binomial_cloud(0, 2, seed=1)
        with pytest.raises(InvalidDimensionError):
            sample_binomial_cloud(5, 0, seed=1)
        with pytest.raises(InvalidParameterError):
            sample_cloud('lattice', 10, 2, seed=1)

    def test_sample_cloud_dispatch(self):
        """sample_cloud dispatches on the process name."""
        assert len(sample_cloud(BINOMIAL, 20.4, 2, seed=1)) == 20
        assert sample_cloud(POISSON, 20, 2, seed=1).process == POISSON


class TestRegion:
    """Tests for Region membership and the slab constructors."""

    def test_half_open_last_axis(self):
        """Slabs are closed below and open above on the last axis."""
        region = Region.slab(2, 0.0, 0.5)
        mask = region.contains(np.array([[0.1, 0.5], [0.1, 0.0], [0.1, 0.25], [1.0, 0.25]]))
        assert mask.tolist() == [True, False, True, False]

    def test_slabs_partition_cloud(self):
        """Gamma, boundary and intermediate regions partition the cloud."""
        cloud = sample_poisson_cloud(2000, 3, seed=2)
        parts = [Region.gamma(3, 0.3), Region.boundary(3, 0.05), Region.intermediate(3, 0.05, 0.3)]
        total = sum(region.contains(cloud.coords).astype(int) for region in parts)
        assert np.all(total == 1)

    def test_inverted_corners_rejected(self):
        """A lower corner above the upper one is rejected."""
        with pytest.raises(InvalidParameterError):
            Region((0.0, 0.5), (1.0, 0.4))

    def test_dimension_mismatch(self):
        """Points of the wrong dimension are rejected."""
        with pytest.raises(InvalidDimensionError):
            Region.whole(2).contains(np.zeros((3, 3)))


class TestProjection:
    """Tests for arrival_order and project_drop_last."""

    def test_two_points(self):
        """The projection drops heights and orders by them."""
        cloud = PointCloud.from_points([(0.2, 0.9), (0.7, 0.1)])
        assert project_drop_last(cloud).tolist() == [[0.7], [0.2]]

    def test_singleton(self):
        """One point projects to its first coordinates."""
        cloud = PointCloud.from_points([(0.1, 0.2, 0.3)])
        assert project_drop_last(cloud).tolist() == [[0.1, 0.2]]

    def test_matches_sort_oracle(self):
        """Arrival order matches a plain sort by height."""
        cloud = sample_binomial_cloud(100, 3, seed=4)
        order = sorted(range(len(cloud)), key=lambda i: cloud.coords[i, -1])
        assert arrival_order(cloud).tolist() == order
        assert np.array_equal(project_drop_last(cloud), cloud.coords[order, :2])

    def test_one_dimensional_rejected(self):
        """A 1-d cloud has nothing left to project."""
        with pytest.raises(InvalidDimensionError):
            project_drop_last(PointCloud.from_points([(0.5,)]))


class TestRandomStreams:
    """Tests for seed derivation and keyed uniforms."""

    def test_replicate_seed_is_stable(self):
        """Seeds depend on the path of keys, in order."""
        assert replicate_seed(3, 1, 2) == replicate_seed(3, 1, 2)
        assert replicate_seed(3, 1, 2) != replicate_seed(3, 2, 1)

    def test_negative_seed_rejected(self):
        """A negative master seed is rejected."""
        with pytest.raises(InvalidParameterError):
            replicate_seed(-1)

    def test_keyed_uniforms_inside_unit_interval(self):
        """Keyed uniforms avoid 0 and 1 and average one half."""
        u = keyed_uniforms(sample_keys(9, 100000))
        assert np.all(u > 0) and np.all(u < 1)
        assert u.mean() == pytest.approx(0.5, abs=0.01)

    def test_sample_keys_offset(self):
        """Keys with an offset continue the unshifted sequence."""
        assert np.array_equal(sample_keys(1, 10)[4:], sample_keys(1, 6, offset=4))
