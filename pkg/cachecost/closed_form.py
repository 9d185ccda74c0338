"""
Closed-form optimal placement.

The cost-constrained placement problem reduces to a two-constraint LP over
the type shares y_1..y_K. Which constraint binds depends on where rho sits
relative to the gamma thresholds, and which type (or pair of adjacent types)
wins depends on where alpha sits relative to the sigma thresholds.

Boundary convention: alpha exactly on sigma_t (within tolerance) is a tie
between types t and t+1 and is resolved towards the larger type, so the
alpha-interval of type t is sigma_t < alpha <= sigma_{t-1}. This keeps the
uncoded-optimality predicate and the solver in agreement at the boundary.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from cachecost.config import config as settings
from cachecost.errors import DomainError
from cachecost.model import (
    SystemConfig,
    TypeAllocation,
    at_most,
    constraint_coefficients,
    constraint_load,
    delivery_from_objective,
    gamma_threshold,
    objective_value,
    rate_placement,
    sigma_threshold,
)

logger = logging.getLogger(__name__)


class RegimeTag(str, Enum):
    """Which LP constraint(s) limit the feasible region."""
    COST_LIMITED = "CostLimited"
    FREE_PLACEMENT = "FreePlacement"
    ARCHITECTURE_LIMITED = "ArchitectureLimited"


@dataclass(frozen=True)
class Regime:
    """Regime label; a and b are set only for ArchitectureLimited (b = a + 1)."""
    tag: RegimeTag
    a: Optional[int] = None
    b: Optional[int] = None

    def __str__(self) -> str:
        if self.tag is RegimeTag.ARCHITECTURE_LIMITED:
            return f"{self.tag.value}(a={self.a}, b={self.b})"
        return self.tag.value


@dataclass(frozen=True)
class OptimalSolution:
    """An allocation together with its regime, rates and the thresholds that decided it."""
    allocation: TypeAllocation
    regime: Regime
    r_placement: float
    r_delivery: float
    objective: float
    active_thresholds: Dict[str, float] = field(default_factory=dict)

    @property
    def support(self) -> Tuple[int, ...]:
        return self.allocation.support

    @property
    def coded_support(self) -> Tuple[int, ...]:
        return self.allocation.coded_support

    @property
    def dominant_type(self) -> int:
        return self.allocation.dominant_type()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime.tag.value,
            "a": self.regime.a,
            "b": self.regime.b,
            "support": list(self.support),
            "dominant_type": self.dominant_type,
            "y": list(self.allocation.shares),
            "x": list(self.allocation.per_subfile()),
            "objective": self.objective,
            "r_placement": self.r_placement,
            "r_delivery": self.r_delivery,
            "active_thresholds": dict(self.active_thresholds),
        }


def classify_regime(config: SystemConfig) -> Regime:
    """Classify a configuration as CostLimited, FreePlacement or ArchitectureLimited."""
    q = constraint_coefficients(config)
    if at_most(q[-1], 1.0):
        return Regime(RegimeTag.FREE_PLACEMENT)
    if not at_most(q[0], 1.0):
        return Regime(RegimeTag.COST_LIMITED)
    # q_t is increasing in t, so the types with q_t <= 1 form a prefix 1..a
    a = max(t for t in range(1, config.users + 1) if at_most(q[t - 1], 1.0))
    return Regime(RegimeTag.ARCHITECTURE_LIMITED, a=a, b=a + 1)


def optimal_type_single(config: SystemConfig, low: int = 1, high: Optional[int] = None) -> int:
    """
    Best single coded type within low..high when only the cost constraint binds.

    Returns the type whose sigma-interval contains alpha, clamped to the range:
    low when alpha lies above sigma_low, high when alpha lies at or below
    sigma_high.
    """
    K = config.users
    high = K if high is None else high
    if not 1 <= low <= high <= K:
        raise DomainError(f"candidate range {low}..{high} is empty or outside 1..{K}")
    for t in range(low, high + 1):
        if config.alpha > sigma_threshold(t, K) + settings.TOLERANCE:
            return t
    return high


def _active_thresholds(config: SystemConfig, regime: Regime, dominant: int) -> Dict[str, float]:
    K = config.users
    if regime.tag is RegimeTag.FREE_PLACEMENT:
        return {"gamma_K": gamma_threshold(config, K)}
    if regime.tag is RegimeTag.COST_LIMITED:
        active = {"gamma_1": gamma_threshold(config, 1)}
    else:
        active = {
            "gamma_a": gamma_threshold(config, regime.a),
            "gamma_b": gamma_threshold(config, regime.b),
            "sigma_a": sigma_threshold(regime.a, K),
        }
    if dominant:
        active["sigma_t"] = sigma_threshold(dominant, K)
        active["sigma_t_minus_1"] = sigma_threshold(dominant - 1, K)
    return active


def build_solution(config: SystemConfig, allocation: TypeAllocation, regime: Regime) -> OptimalSolution:
    """Attach rates, objective and active thresholds to an allocation."""
    objective = objective_value(allocation)
    return OptimalSolution(
        allocation=allocation,
        regime=regime,
        r_placement=rate_placement(config, allocation),
        r_delivery=delivery_from_objective(config.users, objective),
        objective=objective,
        active_thresholds=_active_thresholds(config, regime, allocation.dominant_type()),
    )


def solve(config: SystemConfig) -> OptimalSolution:
    """Optimal type allocation for a configuration."""
    K = config.users
    q = constraint_coefficients(config)
    regime = classify_regime(config)

    if regime.tag is RegimeTag.FREE_PLACEMENT:
        coded = {K: 1.0}
    elif regime.tag is RegimeTag.COST_LIMITED:
        t = optimal_type_single(config, 1, K)
        coded = {t: 1.0 / q[t - 1]}
    else:
        a, b = regime.a, regime.b
        q_a, q_b = q[a - 1], q[b - 1]
        if config.alpha > sigma_threshold(a, K) + settings.TOLERANCE:
            y_b = (1.0 - q_a) / (q_b - q_a)
            if y_b > 0:
                coded = {a: (q_b - 1.0) / (q_b - q_a), b: y_b}
            else:
                # q_a sits within tolerance above one: the pair collapses onto type a
                coded = {a: min(1.0, 1.0 / q_a)}
        else:
            j = optimal_type_single(config, b, K)
            coded = {j: 1.0 / q[j - 1]}

    solution = build_solution(config, TypeAllocation.from_coded(K, coded), regime)
    logger.debug(f"solve K={K} N={config.files} rho={config.rho} alpha={config.alpha}: "
                 f"{solution.regime} support={solution.support}")
    return solution


def uncoded_is_optimal(config: SystemConfig) -> bool:
    """True when alpha is low enough that caching only whole-group (type K) subfiles is optimal."""
    K = config.users
    return config.alpha <= sigma_threshold(K - 1, K) + settings.TOLERANCE


def uncoded_solution(config: SystemConfig) -> OptimalSolution:
    """Best allocation supported on types {0, K}: y_K = min(1, 1/q_K)."""
    K = config.users
    q_K = float(constraint_coefficients(config)[-1])
    y_K = 1.0 if at_most(q_K, 1.0) else 1.0 / q_K
    return build_solution(config, TypeAllocation.from_coded(K, {K: y_K}), classify_regime(config))


def solution_violations(config: SystemConfig, solution: OptimalSolution) -> List[str]:
    """Invariant violations of a solution (empty when it is sound)."""
    problems = []
    alloc = solution.allocation
    tol = settings.TOLERANCE
    if len(solution.coded_support) > 2:
        problems.append(f"support {solution.coded_support} has more than two coded types")
    if not at_most(constraint_load(config, alloc), 1.0):
        problems.append(f"placement-cost constraint violated: load {constraint_load(config, alloc)!r}")
    if not at_most(sum(alloc.shares[1:]), 1.0):
        problems.append("cached shares exceed one")
    if solution.r_placement > solution.r_delivery + tol:
        problems.append(f"R_o={solution.r_placement!r} exceeds R_p={solution.r_delivery!r}")
    if abs(solution.objective - objective_value(alloc)) > tol:
        problems.append("reported objective does not match the allocation")
    return problems
