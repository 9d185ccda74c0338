"""
Tests for the closed-form optimal placement.
"""

import numpy as np
import pytest

from cachecost.closed_form import (
    RegimeTag,
    classify_regime,
    optimal_type_single,
    solution_violations,
    solve,
    uncoded_is_optimal,
    uncoded_solution,
)
from cachecost.errors import DomainError
from cachecost.model import constraint_load, gamma_threshold, make_config, sigma_threshold


class TestRegimeClassification:
    """Tests for regime classification."""

    def test_free_placement(self, free_config):
        assert classify_regime(free_config).tag is RegimeTag.FREE_PLACEMENT

    def test_cost_limited(self, cost_limited_config):
        assert classify_regime(cost_limited_config).tag is RegimeTag.COST_LIMITED

    def test_architecture_limited(self, two_type_config):
        regime = classify_regime(two_type_config)
        assert regime.tag is RegimeTag.ARCHITECTURE_LIMITED
        assert (regime.a, regime.b) == (1, 2)
        assert str(regime) == "ArchitectureLimited(a=1, b=2)"

    def test_boundary_rho_equal_gamma_1(self):
        """q_1 exactly one is still ArchitectureLimited with a = 1."""
        regime = classify_regime(make_config(5, 10, 0.2, 1.0))
        assert regime.tag is RegimeTag.ARCHITECTURE_LIMITED
        assert regime.a == 1

    def test_a_matches_gamma(self, rng):
        """a is the largest t with rho <= gamma_t."""
        for _ in range(300):
            users = int(rng.integers(2, 10))
            config = make_config(users, 2 * users, float(rng.uniform(0.001, 0.5)), float(rng.uniform(0, 1)))
            regime = classify_regime(config)
            if regime.tag is not RegimeTag.ARCHITECTURE_LIMITED:
                continue
            expected = max(t for t in range(1, users + 1) if config.rho <= gamma_threshold(config, t) + 1e-9)
            assert regime.a == expected


class TestOptimalTypeSingle:
    """Tests for the best single type under the cost constraint."""

    def test_linear_architecture_prefers_type_one(self, two_type_config):
        assert optimal_type_single(two_type_config) == 1

    @pytest.mark.parametrize("alpha,expected", [(0.9, 1), (0.35, 2), (0.25, 3), (0.2, 4), (0.1, 5), (0.0, 5)])
    def test_sigma_intervals(self, alpha, expected):
        """Type t wins when sigma_t < alpha <= sigma_{t-1}."""
        assert optimal_type_single(make_config(5, 10, 0.3, alpha)) == expected

    def test_boundary_goes_to_larger_type(self):
        """alpha exactly on sigma_t resolves towards type t + 1."""
        alpha = sigma_threshold(2, 5)
        assert optimal_type_single(make_config(5, 10, 0.3, alpha)) == 3

    def test_clamped_range(self):
        assert optimal_type_single(make_config(5, 10, 0.3, 0.9), 3, 5) == 3
        assert optimal_type_single(make_config(5, 10, 0.3, 0.1), 1, 2) == 2

    def test_empty_range(self, two_type_config):
        with pytest.raises(DomainError):
            optimal_type_single(two_type_config, 4, 3)
        with pytest.raises(DomainError):
            optimal_type_single(two_type_config, 1, 6)


class TestSolve:
    """Tests for the closed-form solver on worked examples."""

    def test_free_placement_caches_everything(self):
        solution = solve(make_config(5, 10, 0.0, 0.7))
        assert solution.allocation.shares[5] == 1.0
        assert solution.r_placement == 0.0
        assert solution.r_delivery == pytest.approx(0.0, abs=1e-12)
        assert solution.objective == pytest.approx(5 / 6)

    def test_two_type_intersection(self, two_type_config):
        solution = solve(two_type_config)
        y = solution.allocation.shares
        assert y[1] == pytest.approx(0.5)
        assert y[2] == pytest.approx(0.5)
        assert solution.coded_support == (1, 2)
        assert solution.objective == pytest.approx(7 / 12)
        assert solution.r_delivery == pytest.approx(1.5)
        assert solution.r_placement == pytest.approx(1.5)

    def test_cost_limited_single_type(self, cost_limited_config):
        solution = solve(cost_limited_config)
        assert solution.allocation.shares[1] == pytest.approx(5 / 6)
        assert solution.allocation.shares[0] == pytest.approx(1 / 6)
        assert solution.r_placement == pytest.approx(2.5)
        assert solution.r_delivery == pytest.approx(2.5)

    def test_single_user(self):
        """K = 1: the only coded type is 1 and it is cost-limited for rho > 0."""
        solution = solve(make_config(1, 1, 0.5, 0.0))
        assert solution.regime.tag is RegimeTag.COST_LIMITED
        assert solution.allocation.shares[1] == pytest.approx(1 / 1.5)
        assert solution.objective == pytest.approx(1 / 3)

    def test_single_user_free(self):
        solution = solve(make_config(1, 3, 0.0, 0.5))
        assert solution.regime.tag is RegimeTag.FREE_PLACEMENT
        assert solution.allocation.shares == (0.0, 1.0)

    def test_boundary_pair_collapses(self):
        """At rho = gamma_1 the intersection degenerates to caching all of type 1."""
        solution = solve(make_config(5, 10, 0.2, 1.0))
        assert solution.allocation.shares[1] == pytest.approx(1.0)
        assert solution.r_delivery == pytest.approx(2.0)
        assert not solution_violations(make_config(5, 10, 0.2, 1.0), solution)

    def test_architecture_limited_single_type(self):
        """Below sigma_a the optimum is one type from b..K, cost-bound."""
        config = make_config(5, 10, 0.1, 0.2)
        solution = solve(config)
        assert len(solution.coded_support) == 1
        (t,) = solution.coded_support
        assert t >= classify_regime(config).b
        assert constraint_load(config, solution.allocation) == pytest.approx(1.0)

    def test_to_dict(self, two_type_config):
        report = solve(two_type_config).to_dict()
        assert report["regime"] == "ArchitectureLimited"
        assert (report["a"], report["b"]) == (1, 2)
        assert report["support"] == [1, 2]
        assert report["dominant_type"] == 2
        assert report["x"][2] == pytest.approx(0.05)
        assert set(report["active_thresholds"]) >= {"gamma_a", "gamma_b", "sigma_a"}


class TestSolutionProperties:
    """Grid checks of the structural properties of the optimum."""

    def test_structure_over_grid(self):
        """Support, feasibility, binding constraints and R_o <= R_p across K = 2..8."""
        for users in range(2, 9):
            for rho in np.linspace(0, 0.5, 100):
                for alpha in np.linspace(0, 1, 100):
                    config = make_config(users, 2 * users, float(rho), float(alpha))
                    solution = solve(config)
                    assert not solution_violations(config, solution), (config, solution)
                    assert len(solution.coded_support) <= 2
                    if len(solution.coded_support) == 2:
                        low, high = solution.coded_support
                        assert high == low + 1
                    if solution.regime.tag is RegimeTag.COST_LIMITED:
                        assert constraint_load(config, solution.allocation) == pytest.approx(1.0)

    def test_dominant_type_non_increasing_in_rho(self):
        """More expensive placement never moves the optimum towards larger types."""
        for alpha in np.linspace(0, 1, 41):
            types = [solve(make_config(5, 10, float(rho), float(alpha))).dominant_type
                     for rho in np.linspace(0, 0.5, 201)]
            assert all(earlier >= later for earlier, later in zip(types, types[1:])), (alpha, types)

    def test_dominant_type_non_increasing_in_alpha(self):
        for rho in np.linspace(0.005, 0.5, 40):
            types = [solve(make_config(5, 10, float(rho), float(alpha))).dominant_type
                     for alpha in np.linspace(0, 1, 201)]
            assert all(earlier >= later for earlier, later in zip(types, types[1:])), (rho, types)


class TestUncodedOptimality:
    """Tests for the uncoded-delivery optimality criterion."""

    def test_examples(self):
        assert uncoded_is_optimal(make_config(5, 10, 0.1, 0.1))
        assert not uncoded_is_optimal(make_config(5, 10, 0.1, 0.5))
        assert uncoded_is_optimal(make_config(5, 10, 0.1, sigma_threshold(4, 5)))

    def test_single_user_always_uncoded(self):
        assert uncoded_is_optimal(make_config(1, 1, 0.3, 1.0))

    def test_support_is_uncoded_below_threshold(self):
        """alpha <= sigma_{K-1}: only types 0 and K are used."""
        sigma = sigma_threshold(4, 5)
        for rho in (0.01, 0.05, 0.1, 0.3):
            for alpha in np.linspace(0, sigma, 100):
                solution = solve(make_config(5, 10, rho, float(alpha)))
                assert set(solution.coded_support) <= {5}

    def test_coded_type_appears_above_threshold(self):
        alpha = sigma_threshold(4, 5) + 0.05
        supports = [solve(make_config(5, 10, rho, alpha)).coded_support for rho in (0.01, 0.05, 0.1, 0.3)]
        assert any(t < 5 for support in supports for t in support)

    def test_criterion_matches_solver(self, rng):
        for _ in range(500):
            users = int(rng.integers(2, 10))
            config = make_config(users, users + int(rng.integers(0, 10)),
                                 float(rng.uniform(0, 0.5)), float(rng.uniform(0, 1)))
            if uncoded_is_optimal(config):
                assert set(solve(config).coded_support) <= {users}


class TestUncodedBaseline:
    """Tests for the best allocation restricted to types 0 and K."""

    @pytest.mark.parametrize("rho,r_opt,r_uncoded", [
        (0.05, 1.0, 5 / 3),
        (0.1, 1.5, 2.5),
        (0.2, 2.0, 10 / 3),
    ])
    def test_gain_at_linear_architecture(self, rho, r_opt, r_uncoded):
        config = make_config(5, 10, rho, 1.0)
        assert solve(config).r_delivery == pytest.approx(r_opt)
        assert uncoded_solution(config).r_delivery == pytest.approx(r_uncoded)

    def test_baseline_never_beats_optimum(self, rng):
        for _ in range(300):
            users = int(rng.integers(1, 9))
            config = make_config(users, 2 * users, float(rng.uniform(0, 0.5)), float(rng.uniform(0, 1)))
            assert uncoded_solution(config).r_delivery >= solve(config).r_delivery - 1e-9

    def test_baseline_equals_optimum_when_uncoded_optimal(self):
        config = make_config(5, 10, 0.1, 0.1)
        assert uncoded_solution(config).r_delivery == pytest.approx(solve(config).r_delivery)
