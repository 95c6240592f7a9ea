"""Tests for the J, H and G fixed-point samplers."""
import numpy as np
import pytest

from mdst_utils.errors import DomainError, InvalidParameterError
from mdst_utils.fixed_point import (FAMILIES, G, H, J, coefficients, drift, recompose_fixed_point,
                                    sample_fixed_point_batch, sample_limit_G, sample_limit_H,
                                    sample_limit_J)
from mdst_utils.statistics import EmpiricalDistribution, ks_critical_value, ks_two_sample

N = 2000
TOL = 1e-3


class TestDomain:
    """Tests for parameter checks."""

    def test_g_needs_alpha_at_least_one(self):
        """G is only defined from alpha = 1 up."""
        with pytest.raises(DomainError):
            sample_limit_G(0.9)

    @pytest.mark.parametrize('family', [J, H])
    def test_j_and_h_need_alpha_above_half(self, family):
        """J and H need alpha above one half."""
        with pytest.raises(DomainError):
            sample_fixed_point_batch(family, 0.5, 10)

    def test_unknown_family(self):
        """An unknown family name is rejected."""
        with pytest.raises(InvalidParameterError):
            sample_fixed_point_batch('K', 1.0, 10)

    def test_nonpositive_tolerance(self):
        """A zero tolerance is rejected."""
        with pytest.raises(InvalidParameterError):
            sample_fixed_point_batch(J, 1.0, 10, coeff_tol=0.0)


class TestDrift:
    """The drift terms have mean zero, so every family is centred."""

    @pytest.mark.parametrize('alpha', [0.75, 1.0, 2.0, 3.5])
    def test_drift_means_vanish(self, alpha):
        """Every family's drift has mean zero under a uniform U."""
        u = (np.arange(200000) + 0.5) / 200000
        for code, family in enumerate(FAMILIES):
            if family == G and alpha < 1:
                continue
            mean = drift(np.full(len(u), code), u, alpha).mean()
            assert mean == pytest.approx(0.0, abs=1e-6)

    def test_alpha_one_log_convention(self):
        """0 log 0 = 0 at the ends of the unit interval."""
        values = drift(np.array([0, 1, 2]), np.array([0.0, 1.0, 0.0]), 1.0)
        assert values.tolist() == pytest.approx([0.0, 0.5, 0.25])

    def test_coefficients(self):
        """At alpha = 2 the coefficients are U^2 and (1 - U)^2."""
        a, b = coefficients(np.array([0.25]), 2.0)
        assert a.tolist() == pytest.approx([0.0625])
        assert b.tolist() == pytest.approx([0.5625])


class TestSamplers:
    """Statistical checks of the direct samplers."""

    @pytest.mark.parametrize('family', FAMILIES)
    @pytest.mark.parametrize('alpha', [1.0, 2.0])
    def test_mean_zero(self, family, alpha):
        """Sample means sit within three standard errors of zero."""
        batch = sample_fixed_point_batch(family, alpha, N, seed=3, coeff_tol=TOL)
        dist = EmpiricalDistribution.from_samples(batch.values)
        assert abs(dist.mean) < 3 * dist.stderr

    @pytest.mark.parametrize('family', FAMILIES)
    @pytest.mark.parametrize('alpha', [1.0, 2.0])
    def test_recomposition(self, family, alpha):
        """One step of the family's equation preserves the law."""
        direct = sample_fixed_point_batch(family, alpha, N, seed=5, coeff_tol=TOL).values
        recomposed = recompose_fixed_point(family, alpha, N, seed=6, coeff_tol=TOL)
        assert ks_two_sample(direct, recomposed) < ks_critical_value(N, N, 0.001)

    def test_variance_stable_under_tolerance(self):
        """Halving the tolerance leaves the variance of G unchanged."""
        coarse = sample_fixed_point_batch(G, 2.0, N, seed=8, coeff_tol=TOL).values
        fine = sample_fixed_point_batch(G, 2.0, N, seed=8, coeff_tol=TOL / 2).values
        assert np.var(fine) == pytest.approx(np.var(coarse), rel=0.01)

    def test_smaller_tolerance_goes_deeper(self):
        """A finer tolerance visits deeper nodes and discards less."""
        coarse = sample_fixed_point_batch(J, 1.0, 200, seed=2, coeff_tol=1e-2)
        fine = sample_fixed_point_batch(J, 1.0, 200, seed=2, coeff_tol=1e-3)
        assert np.all(fine.max_depth >= coarse.max_depth)
        assert fine.discarded.mean() < coarse.discarded.mean()

    def test_batches_split_consistently(self):
        """A batch split by offset reproduces the same draws."""
        whole = sample_fixed_point_batch(H, 2.0, 20, seed=4, coeff_tol=1e-2)
        tail = sample_fixed_point_batch(H, 2.0, 10, seed=4, coeff_tol=1e-2, offset=10)
        assert np.array_equal(whole.values[10:], tail.values)

    def test_single_draws(self):
        """The single-draw samplers return finite values with their statistics."""
        for sampler in (sample_limit_J, sample_limit_H, sample_limit_G):
            sample = sampler(1.0, seed=1, coeff_tol=1e-2)
            depth, discarded = sample.truncation_stats
            assert np.isfinite(sample.value)
            assert depth >= 1
            assert discarded >= 0.0
        assert sample_limit_J(2.0, seed=9).value == sample_limit_J(2.0, seed=9).value

    def test_discarded_mass_bounded_by_tolerance(self):
        """At alpha >= 1 the dropped coefficients sum to at most one, so their squares stay below coeff_tol."""
        batch = sample_fixed_point_batch(G, 1.0, 200, seed=1, coeff_tol=1e-2)
        assert np.all(batch.discarded <= 1e-2 + 1e-12)
        assert len(list(batch.samples())) == 200

    @pytest.mark.parametrize('family', [J, H])
    @pytest.mark.parametrize('alpha,tol,size', [(0.75, 1e-2, 200), (0.6, 0.2, 50)])
    def test_discarded_mass_bounded_below_alpha_one(self, family, alpha, tol, size):
        """Below alpha = 1 the cut is lowered until every draw meets the tolerance."""
        batch = sample_fixed_point_batch(family, alpha, size, seed=1, coeff_tol=tol)
        assert np.all(batch.discarded <= tol)
        assert np.all(np.isfinite(batch.values))

    def test_draws_below_alpha_one_split_consistently(self):
        """A draw's lowered cut depends on the draw alone, not on its batch."""
        whole = sample_fixed_point_batch(J, 0.75, 40, seed=6, coeff_tol=1e-2)
        tail = sample_fixed_point_batch(J, 0.75, 20, seed=6, coeff_tol=1e-2, offset=20)
        assert np.array_equal(whole.values[20:], tail.values)
        assert np.array_equal(whole.discarded[20:], tail.discarded)

    def test_unreachable_tolerance_rejected(self):
        """The default tolerance at alpha = 0.6 would need more nodes than a draw may use."""
        with pytest.raises(DomainError, match='coeff_tol'):
            sample_fixed_point_batch(J, 0.6, 10)
