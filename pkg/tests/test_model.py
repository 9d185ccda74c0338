"""
Tests for the cost model, rate formulas and thresholds.
"""

import math

import numpy as np
import pytest

from cachecost.errors import BinomialOverflowError, ConfigError, DomainError
from cachecost.model import (
    TypeAllocation,
    binom,
    constraint_coefficients,
    delivery_from_objective,
    gamma_threshold,
    is_feasible,
    make_config,
    multiplicities,
    objective_value,
    placement_cost,
    rate_delivery,
    rate_placement,
    sigma_threshold,
    thresholds,
)


def random_allocation(rng, users):
    return TypeAllocation.from_vector(rng.dirichlet(np.ones(users + 1)))


class TestBinomial:
    """Tests for exact binomial coefficients."""

    def test_known_values(self):
        """Small coefficients match the textbook values."""
        assert binom(5, 2) == 10
        assert binom(5, 0) == 1
        assert binom(8, 4) == 70
        assert binom(64, 32) == 1832624140942590534

    def test_pascal_rule(self):
        """C(n, k) = C(n-1, k-1) + C(n-1, k) up to the ceiling."""
        for n in range(1, 65):
            for k in range(1, n):
                assert binom(n, k) == binom(n - 1, k - 1) + binom(n - 1, k)

    def test_symmetry(self):
        """C(n, k) = C(n, n-k)."""
        for n in range(0, 30):
            for k in range(n + 1):
                assert binom(n, k) == binom(n, n - k)

    def test_overflow_beyond_ceiling(self):
        """n above 64 is refused rather than silently rounded."""
        with pytest.raises(BinomialOverflowError):
            binom(65, 3)
        with pytest.raises(OverflowError):
            binom(100, 50)

    def test_bad_arguments(self):
        """k outside 0..n is a domain error."""
        with pytest.raises(DomainError):
            binom(3, 4)
        with pytest.raises(DomainError):
            binom(3, -1)

    def test_multiplicities_sum_to_power_of_two(self):
        """The subfile counts of all types add up to 2^K."""
        for users in (1, 5, 12):
            assert sum(multiplicities(users)) == 2 ** users


class TestSystemConfig:
    """Tests for configuration validation."""

    def test_valid(self):
        config = make_config(5, 10, 0.1, 1.0)
        assert config.users == 5
        assert config.files == 10

    def test_users_exceed_files(self):
        with pytest.raises(ConfigError):
            make_config(6, 5, 0.1, 0.5)

    def test_rho_above_one_needs_override(self):
        """rho > 1 is rejected unless exploration is explicitly allowed."""
        with pytest.raises(ConfigError):
            make_config(2, 2, 1.5, 0.5)
        assert make_config(2, 2, 1.5, 0.5, allow_rho_gt_1=True).rho == 1.5

    @pytest.mark.parametrize("alpha", [-0.1, 1.2])
    def test_alpha_out_of_range(self, alpha):
        with pytest.raises(ConfigError):
            make_config(2, 2, 0.1, alpha)

    def test_negative_rho(self):
        with pytest.raises(ConfigError):
            make_config(2, 2, -0.01, 0.5)

    def test_too_many_users(self):
        with pytest.raises(ConfigError):
            make_config(65, 100, 0.1, 0.5)

    def test_nan_rejected(self):
        with pytest.raises(ConfigError):
            make_config(2, 2, float("nan"), 0.5)

    def test_config_is_immutable(self, two_type_config):
        with pytest.raises(Exception):
            two_type_config.rho = 0.2


class TestPlacementCost:
    """Tests for the per-unit placement cost c_r = rho * r^alpha."""

    def test_zero_rho_is_free(self):
        config = make_config(5, 10, 0.0, 0.5)
        assert placement_cost(config, 3) == 0.0

    def test_linear_architecture(self, two_type_config):
        """alpha = 1: cost grows linearly with the number of recipients."""
        assert placement_cost(two_type_config, 2) == pytest.approx(0.2)
        assert placement_cost(two_type_config, 5) == pytest.approx(0.5)

    def test_shared_medium(self):
        """alpha = 0: a multicast costs the same as a unicast."""
        config = make_config(7, 7, 0.3, 0.0)
        assert placement_cost(config, 7) == pytest.approx(0.3)
        assert placement_cost(config, 1) == pytest.approx(0.3)

    def test_single_recipient_is_exact(self):
        config = make_config(4, 8, 0.37, 0.83)
        assert placement_cost(config, 1) == 0.37

    @pytest.mark.parametrize("r", [0, 6])
    def test_recipient_count_out_of_range(self, two_type_config, r):
        with pytest.raises(DomainError):
            placement_cost(two_type_config, r)


class TestTypeAllocation:
    """Tests for allocation invariants."""

    def test_negative_share_rejected(self):
        with pytest.raises(ConfigError):
            TypeAllocation((1.1, -0.1, 0.0))

    def test_sum_must_be_one(self):
        with pytest.raises(ConfigError):
            TypeAllocation((0.5, 0.4, 0.0))

    def test_from_coded_fills_reactive_part(self):
        alloc = TypeAllocation.from_coded(5, {1: 0.5, 2: 0.25})
        assert alloc.shares[0] == pytest.approx(0.25)
        assert alloc.support == (0, 1, 2)
        assert alloc.coded_support == (1, 2)

    def test_from_coded_rejects_unknown_type(self):
        with pytest.raises(DomainError):
            TypeAllocation.from_coded(3, {4: 0.5})

    def test_per_subfile_recovers_shares(self, rng):
        """x_t * C(K, t) gives back y_t."""
        for _ in range(20):
            users = int(rng.integers(1, 10))
            alloc = random_allocation(rng, users)
            a = multiplicities(users)
            for t, x in enumerate(alloc.per_subfile()):
                assert x * a[t] == pytest.approx(alloc.shares[t], abs=1e-15)

    def test_dominant_type(self):
        assert TypeAllocation.from_coded(5, {1: 0.3, 2: 0.6}).dominant_type() == 2
        assert TypeAllocation.from_coded(5, {1: 0.5, 2: 0.5}).dominant_type() == 2
        assert TypeAllocation.from_coded(5, {}).dominant_type() == 0


class TestRates:
    """Tests for the placement and delivery rate formulas."""

    def test_free_placement_rate_is_zero(self, free_config, rng):
        assert rate_placement(free_config, random_allocation(rng, 5)) == 0.0

    def test_uncoded_extremes(self, two_type_config):
        """Everything cached at type K needs no delivery; nothing cached needs K."""
        full = TypeAllocation.from_coded(5, {5: 1.0})
        empty = TypeAllocation.from_coded(5, {})
        assert rate_delivery(two_type_config, full) == 0.0
        assert rate_delivery(two_type_config, empty) == 5.0
        assert rate_placement(two_type_config, empty) == 0.0

    def test_two_type_example(self, two_type_config):
        alloc = TypeAllocation.from_coded(5, {1: 0.5, 2: 0.5})
        assert rate_placement(two_type_config, alloc) == pytest.approx(1.5)
        assert rate_delivery(two_type_config, alloc) == pytest.approx(1.5)
        assert objective_value(alloc) == pytest.approx(7 / 12)

    def test_cost_limited_example(self, cost_limited_config):
        alloc = TypeAllocation.from_coded(5, {1: 5 / 6})
        assert rate_placement(cost_limited_config, alloc) == pytest.approx(2.5)
        assert rate_delivery(cost_limited_config, alloc) == pytest.approx(2.5)

    def test_delivery_identity(self, rng):
        """sum b_t y_t equals K - (K+1) * sum t/(t+1) y_t for random allocations."""
        for _ in range(1000):
            users = int(rng.integers(1, 16))
            config = make_config(users, users, float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
            alloc = random_allocation(rng, users)
            direct = rate_delivery(config, alloc)
            via_objective = delivery_from_objective(users, objective_value(alloc))
            assert direct == pytest.approx(via_objective, abs=1e-12)

    def test_allocation_for_other_users_rejected(self, two_type_config):
        with pytest.raises(ConfigError):
            rate_delivery(two_type_config, TypeAllocation.from_coded(3, {3: 1.0}))

    def test_feasibility(self, two_type_config):
        assert is_feasible(two_type_config, TypeAllocation.from_coded(5, {1: 0.5, 2: 0.5}))
        assert not is_feasible(two_type_config, TypeAllocation.from_coded(5, {5: 1.0}))


class TestThresholds:
    """Tests for the gamma and sigma regime boundaries."""

    def test_sigma_values(self):
        assert sigma_threshold(1, 5) == pytest.approx(0.415037, abs=1e-6)
        assert sigma_threshold(2, 5) == pytest.approx(0.290489, abs=1e-6)
        assert sigma_threshold(3, 5) == pytest.approx(0.224340, abs=1e-6)
        assert sigma_threshold(4, 5) == pytest.approx(0.182941, abs=1e-6)

    def test_sigma_endpoints(self):
        assert sigma_threshold(0, 5) == 1.0
        assert sigma_threshold(5, 5) == 0.0

    def test_sigma_decreasing(self):
        sigma = [sigma_threshold(t, 20) for t in range(21)]
        assert all(earlier > later for earlier, later in zip(sigma, sigma[1:]))

    def test_gamma_values(self, two_type_config):
        gamma = thresholds(two_type_config).gamma
        assert gamma[0] == 1.0
        expected = [0.2, 0.05, 1 / 60, 0.005, 0.0]
        assert list(gamma[1:]) == pytest.approx(expected)

    def test_gamma_decreasing(self, rng):
        for _ in range(100):
            users = int(rng.integers(2, 12))
            config = make_config(users, users * 2, 0.1, float(rng.uniform(0, 1)))
            gamma = [gamma_threshold(config, t) for t in range(1, users + 1)]
            assert all(earlier > later for earlier, later in zip(gamma, gamma[1:]))

    def test_q_values(self, two_type_config):
        q = constraint_coefficients(two_type_config)
        assert list(q) == pytest.approx([0.8, 1.2, 1.5, 1.76, 2.0])

    def test_coefficient_lookup(self, two_type_config):
        th = thresholds(two_type_config)
        assert th.coefficient(1) == pytest.approx(0.8)
        with pytest.raises(DomainError):
            th.coefficient(0)

    def test_q_below_one_iff_rho_below_gamma(self, rng):
        """q_t <= 1 exactly when rho <= gamma_t."""
        for _ in range(1000):
            users = int(rng.integers(1, 12))
            files = users + int(rng.integers(0, 20))
            config = make_config(users, files, float(rng.uniform(0, 0.5)), float(rng.uniform(0, 1)))
            q = constraint_coefficients(config)
            for t in range(1, users + 1):
                gamma = gamma_threshold(config, t)
                if abs(config.rho - gamma) < 1e-9:
                    continue
                assert (q[t - 1] <= 1) == (config.rho <= gamma)

    def test_q_increasing_and_concave(self, rng):
        """For rho > 0, q_t increases strictly with t and has negative second differences."""
        for _ in range(200):
            users = int(rng.integers(3, 20))
            config = make_config(users, users, float(rng.uniform(0.01, 1)), float(rng.uniform(0, 1)))
            q = np.asarray(constraint_coefficients(config))
            assert np.all(np.diff(q) > 0)
            assert np.all(np.diff(q, n=2) < 0)

    def test_q_at_zero_rho(self):
        """With free placement q_t = t(K+1)/(K(t+1)) and q_K = 1."""
        config = make_config(4, 4, 0.0, 0.3)
        q = constraint_coefficients(config)
        assert q[-1] == pytest.approx(1.0)
        assert q[0] == pytest.approx(5 / 8)
        assert math.isclose(q[1], 2 * 5 / (4 * 3))
