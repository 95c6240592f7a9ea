"""Tests for the limit constants."""
import math

import pytest

from mdst_utils.errors import DomainError, InvalidDimensionError, InvalidParameterError
from mdst_utils.limit_laws import (MonteCarloBudget, limit_constants, lln_constant, lln_constant_quadrature,
                                   mu1, mu1_constant, mu_prime, ong_weight_variances, two_over_vd, xi_mean)


class TestLlnConstant:
    """Tests for lln_constant and its quadrature cross-check."""

    def test_d2_alpha1(self):
        """In the plane at alpha = 1 the constant is sqrt(2)/2."""
        assert lln_constant(2, 1.0) == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    def test_d2_alpha_near_two(self):
        """The constant tends to 2/pi as alpha approaches d = 2."""
        assert lln_constant(2, 2.0 - 1e-9) == pytest.approx(2 / math.pi, rel=1e-6)

    def test_d3_alpha1(self):
        """Closed form in three dimensions at alpha = 1."""
        expected = 2 ** (1 / 3) * math.gamma(4 / 3) * (3 / (4 * math.pi)) ** (1 / 3)
        assert lln_constant(3, 1.0) == pytest.approx(expected, rel=1e-12)
        assert lln_constant(3, 1.0) == pytest.approx(0.6974, abs=1e-3)

    @pytest.mark.parametrize('d,alpha', [(2, 0.5), (2, 1.0), (3, 1.0), (3, 2.5), (5, 1.0)])
    def test_matches_quadrature(self, d, alpha):
        """The closed form agrees with numerical quadrature."""
        value, _ = lln_constant_quadrature(d, alpha)
        assert value == pytest.approx(lln_constant(d, alpha), rel=1e-8)

    def test_domain(self):
        """alpha outside (0, d) and d = 0 are rejected."""
        with pytest.raises(DomainError):
            lln_constant(2, 2.0)
        with pytest.raises(DomainError):
            lln_constant(2, 0.0)
        with pytest.raises(InvalidDimensionError):
            lln_constant(0, 0.5)

    def test_xi_mean_row(self):
        """xi_mean is an estimate carrying its quadrature error."""
        row = xi_mean(2, 1.0)
        assert row.exact is False
        assert row.value == pytest.approx(math.sqrt(2) / 2, rel=1e-8)
        assert row.stderr is not None


class TestMu1:
    """Tests for mu1."""

    def test_values(self):
        """Closed-form values at alpha = 2 and 3."""
        assert mu1(2.0) == pytest.approx(5 / 12)
        assert mu1(3.0) == pytest.approx(17 / 96)

    def test_decreasing(self):
        """mu1 decreases in alpha towards zero."""
        values = [mu1(float(a)) for a in range(2, 51)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-3

    def test_domain(self):
        """alpha = 1 is outside the domain."""
        with pytest.raises(DomainError):
            mu1(1.0)

    def test_extrapolated_below_two(self):
        """Values below alpha = 2 are tagged extrapolated."""
        assert mu1_constant(1.5).extrapolated
        assert not mu1_constant(2.0).extrapolated


class TestMuPrime:
    """Tests for mu_prime."""

    def test_d2_alpha2(self):
        """At alpha = d = 2 the boundary term 2/pi is added."""
        row = mu_prime(2, 2.0)
        assert row.exact
        assert row.value == pytest.approx(5 / 12 + 2 / math.pi)
        assert row.value == pytest.approx(1.053286, abs=1e-6)

    def test_d2_alpha3(self):
        """Above alpha = d only mu1 remains."""
        assert mu_prime(2, 3.0).value == pytest.approx(17 / 96)

    def test_domain(self):
        """alpha below d is rejected."""
        with pytest.raises(DomainError):
            mu_prime(2, 1.5)

    def test_monte_carlo_estimate(self):
        """In d = 3 the constant is a seeded Monte Carlo estimate."""
        budget = MonteCarloBudget(m_small=50, m_large=200, replicates=4)
        row = mu_prime(3, 3.0, budget, seed=1)
        assert not row.exact
        assert row.stderr is not None and row.stderr > 0
        assert row.sample_sizes == (50, 200)
        assert math.isfinite(row.value)
        assert mu_prime(3, 3.0, budget, seed=1).value == row.value

    def test_two_over_vd(self):
        """2/v_2 is 2/pi."""
        assert two_over_vd(2) == pytest.approx(2 / math.pi)


class TestLimitConstants:
    """Tests for the constants table."""

    def test_below_d(self):
        """Constants listed for alpha below d."""
        names = [c.name for c in limit_constants(2, 1.0)]
        assert names == ['lln', 'xi_mean', 'two_over_vd']

    def test_at_d(self):
        """Constants listed for alpha equal to d."""
        names = [c.name for c in limit_constants(2, 2.0)]
        assert names == ['xi_mean', 'two_over_vd', 'mu1', 'mu_prime']

    def test_row_format(self):
        """Sample sizes render as a space-separated string."""
        row = mu_prime(3, 3.0, MonteCarloBudget(m_small=20, m_large=80, replicates=3)).as_row()
        assert row['sample_sizes'] == '20 80'
        assert row['name'] == 'mu_prime'


class TestOngWeightVariances:
    """Tests for ong_weight_variances."""

    def test_bounded_above_half_dimension(self):
        """At alpha = 2 in d = 1 the variance barely moves between 20 and 200 points."""
        variances = ong_weight_variances(1, 2.0, [20, 200], 200, seed=2)
        assert set(variances) == {20, 200}
        assert 0.4 < variances[200] / variances[20] < 2.5

    def test_grows_below_half_dimension(self):
        """At alpha = 1/4 in d = 1 the variance grows like the square root of m."""
        variances = ong_weight_variances(1, 0.25, [20, 2000], 100, seed=3)
        assert variances[2000] > 3 * variances[20]

    def test_reproducible(self):
        """The same seed gives the same variances."""
        assert ong_weight_variances(2, 1.5, [40], 10, seed=4) == ong_weight_variances(2, 1.5, [40], 10, seed=4)

    def test_needs_two_replicates(self):
        """One replicate has no sample variance."""
        with pytest.raises(InvalidParameterError):
            ong_weight_variances(1, 2.0, [10], 1)
