"""
Tests for grid verification of the closed form against the vertex oracle.
"""

import pytest
from pydantic import ValidationError

from cachecost.closed_form import RegimeTag
from cachecost.model import make_config
from cachecost.verification import VerifyGrid, run_verification, verify_point


class TestVerifyGrid:
    """Tests for grid construction."""

    def test_default_grid_size(self):
        grid = VerifyGrid()
        assert sum(1 for _ in grid.configs()) == 7 * 3 * 50 * 50

    def test_explicit_files_skip_too_small(self):
        grid = VerifyGrid(users=[3, 6], files=[4, 10], rho_steps=1, alpha_steps=1)
        assert [(c.users, c.files) for c in grid.configs()] == [(3, 4), (3, 10), (6, 10)]

    def test_empty_users_rejected(self):
        with pytest.raises(ValidationError):
            VerifyGrid(users=[])

    def test_inverted_range_rejected(self):
        with pytest.raises(ValidationError):
            VerifyGrid(rho_min=0.4, rho_max=0.1)


class TestVerifyPoint:
    """Tests for single-point verification."""

    def test_two_type_example(self, two_type_config):
        check = verify_point(two_type_config)
        assert check.ok
        assert check.regime is RegimeTag.ARCHITECTURE_LIMITED
        assert check.claims_hold is True
        assert check.discrepancy <= 1e-12

    def test_cost_limited_has_no_claims(self, cost_limited_config):
        check = verify_point(cost_limited_config)
        assert check.ok
        assert check.claims_hold is None

    def test_uncoded_boundary(self):
        check = verify_point(make_config(5, 10, 0.1, 0.18294))
        assert check.ok


class TestRunVerification:
    """Acceptance run over the default grid."""

    def test_default_grid_passes(self):
        """K = 2..8, N in {K, 2K, 5K}, 50 x 50 over rho in [0, 0.5] and alpha in [0, 1]."""
        summary = run_verification(VerifyGrid())
        assert summary.points == 52_500
        assert summary.max_discrepancy <= 1e-9
        assert summary.mismatches == 0
        assert summary.invariant_violations == 0
        assert summary.claims_checked > 0
        assert summary.claims_passed == summary.claims_checked
        assert summary.passed
        assert summary.offenders == []

    def test_summary_export(self):
        summary = run_verification(VerifyGrid(users=[3], file_multipliers=[2], rho_steps=5, alpha_steps=5))
        data = summary.to_dict()
        assert data["points"] == 25
        assert data["passed"] is True
        assert sum(data["regime_counts"].values()) == 25
