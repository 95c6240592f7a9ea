"""Tests for the property suite."""
import pytest

from mdst_utils.verification import (CHECKS, QUICK, CheckResult, SuiteSize, check_coupling,
                                     check_lln_quadrature, check_ong_variance_bounded, check_record_identity,
                                     check_unit_ball_recursion, run_property_suite)

TINY = SuiteSize(oracle_instances=4, oracle_max_points=120, record_sequences=100,
                 coupling_replicates=2, coupling_points=300, clouds=2,
                 variance_sizes=(30, 100, 300), variance_replicates=150)


class TestChecks:
    """Every check passes on small random instances."""

    @pytest.mark.parametrize('check', CHECKS, ids=lambda c: c.__name__)
    def test_check_passes(self, check):
        """Each check passes on small instances."""
        result = check(TINY, 1)
        assert isinstance(result, CheckResult)
        assert result.passed, result
        assert result.failures == 0
        assert result.cases > 0

    def test_case_counts(self):
        """Case counts follow the suite size."""
        assert check_record_identity(TINY, 0).cases == 100
        assert check_coupling(TINY, 0).cases == 2 * 3 * 2
        assert check_unit_ball_recursion(TINY, 0).cases == 18
        assert check_lln_quadrature(TINY, 0).cases == 6
        assert check_ong_variance_bounded(TINY, 0).cases == 2

    def test_row(self):
        """A result renders as a flat row."""
        row = CheckResult('demo', False, 3, 1, 'detail').as_row()
        assert row == {'name': 'demo', 'passed': False, 'cases': 3, 'failures': 1, 'detail': 'detail'}


class TestRunPropertySuite:

    def test_quick_suite(self):
        """The quick suite runs every check in order and passes."""
        results = run_property_suite(quick=True, seed=0)
        assert [r.name for r in results] == [
            'mdst_oracle_equivalence',
            'ong_oracle_equivalence',
            'mdst_tree_structure',
            'record_identity',
            'decomposition_identity',
            'coupling_bounds',
            'degree_domination',
            'ong_longest_edge_monotone',
            'scale_and_translation',
            'unit_ball_recursion',
            'lln_quadrature',
            'ong_variance_bounded',
        ]
        assert all(r.passed for r in results)

    def test_quick_sizes_stay_small(self):
        """The quick suite stays small enough for a test run."""
        assert QUICK.oracle_max_points <= 500
        assert QUICK.coupling_points <= 500
        assert max(QUICK.variance_sizes) <= 500
