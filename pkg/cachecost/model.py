"""
Problem instance, cost model and rate formulas.

Every other module consumes these definitions. A file of unit length is split
into subfiles indexed by user subsets S; all subfiles of the same type
t = |S| share one size x_t, and y_t = C(K, t) * x_t is the fraction of a file
held by type t as a whole. Type 0 is the reactive part, never cached.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cachecost.config import config as settings
from cachecost.errors import BinomialOverflowError, ConfigError, DomainError

logger = logging.getLogger(__name__)


class SystemConfig(BaseModel):
    """A caching problem instance: K users, N files, cost multiplier and exponent."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    users: int = Field(..., description="Number of users K", ge=1)
    files: int = Field(..., description="Number of files N (K <= N)", ge=1)
    rho: float = Field(..., description="Linear placement cost multiplier", ge=0)
    alpha: float = Field(..., description="Architecture cost exponent", ge=0, le=1)
    allow_rho_gt_1: bool = Field(
        default=False,
        description="Accept rho > 1 for exploration beyond the modelled range"
    )

    @model_validator(mode="after")
    def _check_ranges(self) -> "SystemConfig":
        if self.users > self.files:
            raise ValueError(f"users ({self.users}) must not exceed files ({self.files})")
        if self.users > settings.MAX_BINOM_N:
            raise ValueError(f"users ({self.users}) exceeds the supported maximum {settings.MAX_BINOM_N}")
        if self.rho > 1 and not self.allow_rho_gt_1:
            raise ValueError(f"rho ({self.rho}) must lie in [0, 1]; pass allow_rho_gt_1 to explore beyond")
        return self


def make_config(users: int, files: int, rho: float, alpha: float, allow_rho_gt_1: bool = False) -> SystemConfig:
    """Build a SystemConfig, reporting validation failures as ConfigError."""
    try:
        return SystemConfig(users=users, files=files, rho=rho, alpha=alpha, allow_rho_gt_1=allow_rho_gt_1)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) for 0 <= k <= n <= MAX_BINOM_N."""
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"binom requires 0 <= k <= n, got n={n}, k={k}")
    if n > settings.MAX_BINOM_N:
        raise BinomialOverflowError(
            f"binom({n}, {k}) exceeds the exact-arithmetic ceiling n <= {settings.MAX_BINOM_N}"
        )
    return math.comb(n, k)


@lru_cache(maxsize=None)
def multiplicities(users: int) -> Tuple[int, ...]:
    """Number of subfiles of each type, a_t = C(K, t) for t = 0..K."""
    return tuple(binom(users, t) for t in range(users + 1))


def power(t: int, alpha: float) -> float:
    """t**alpha for t >= 1, with 1**alpha == 1 exactly."""
    if t == 1:
        return 1.0
    return float(t) ** alpha


def placement_cost(config: SystemConfig, r: int) -> float:
    """Per-unit cost of a placement transmission to r users, c_r = rho * r**alpha."""
    if not 1 <= r <= config.users:
        raise DomainError(f"recipient count r={r} outside 1..{config.users}")
    if config.rho == 0:
        return 0.0
    return config.rho * power(r, config.alpha)


def placement_costs(config: SystemConfig) -> np.ndarray:
    """Vector c_0..c_K with c_0 = 0 (the reactive type is never placed)."""
    costs = np.zeros(config.users + 1)
    for r in range(1, config.users + 1):
        costs[r] = placement_cost(config, r)
    return costs


@lru_cache(maxsize=None)
def delivery_factors(users: int) -> Tuple[float, ...]:
    """b_t = (K - t) / (t + 1) for t = 0..K."""
    return tuple((users - t) / (t + 1) for t in range(users + 1))


@lru_cache(maxsize=None)
def objective_weights(users: int) -> Tuple[float, ...]:
    """Objective weights t / (t + 1) for t = 0..K."""
    return tuple(t / (t + 1) for t in range(users + 1))


def constraint_coefficients(config: SystemConfig) -> np.ndarray:
    """q_t = (c_t N (t+1) + t (K+1)) / (K (t+1)) for t = 1..K (index 0 holds q_1)."""
    K, N = config.users, config.files
    t = np.arange(1, K + 1)
    costs = placement_costs(config)[1:]
    return (costs * N * (t + 1) + t * (K + 1)) / (K * (t + 1))


def at_most(value: float, bound: float) -> bool:
    """value <= bound under the shared comparison tolerance."""
    return value <= bound + settings.TOLERANCE


@dataclass(frozen=True)
class TypeAllocation:
    """
    Fractions y_0..y_K of each file assigned to the caching types.

    Entries are non-negative and sum to one; y_0 is the reactive part.
    """
    shares: Tuple[float, ...]

    def __post_init__(self):
        if len(self.shares) < 2:
            raise ConfigError("an allocation needs at least types 0 and 1")
        if any(y < 0 for y in self.shares):
            raise ConfigError(f"allocation has negative entries: {self.shares}")
        total = math.fsum(self.shares)
        if abs(total - 1.0) > settings.SUM_TOLERANCE:
            raise ConfigError(f"allocation sums to {total!r}, expected 1")

    @classmethod
    def from_coded(cls, users: int, coded: Dict[int, float]) -> "TypeAllocation":
        """Build an allocation from coded shares {t: y_t}; the remainder becomes y_0."""
        shares = [0.0] * (users + 1)
        for t, y in coded.items():
            if not 1 <= t <= users:
                raise DomainError(f"coded type {t} outside 1..{users}")
            shares[t] = float(y)
        cached = math.fsum(shares[1:])
        if cached > 1.0 + settings.SUM_TOLERANCE:
            raise ConfigError(f"coded shares sum to {cached!r} > 1")
        remainder = 1.0 - cached
        shares[0] = remainder if remainder > settings.SUM_TOLERANCE else 0.0
        # Absorb float residue so the sum rule holds exactly
        if cached > 1.0:
            top = max(range(1, users + 1), key=lambda i: shares[i])
            shares[top] -= cached - 1.0
        return cls(tuple(shares))

    @classmethod
    def from_vector(cls, values: Iterable[float]) -> "TypeAllocation":
        """Build an allocation from a full y_0..y_K vector, clipping float noise below zero."""
        shares = [0.0 if abs(v) <= settings.SUM_TOLERANCE and v < 0 else float(v) for v in values]
        return cls(tuple(shares))

    @property
    def users(self) -> int:
        return len(self.shares) - 1

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.shares, dtype=float)

    @property
    def support(self) -> Tuple[int, ...]:
        """Type indices with a positive share."""
        return tuple(t for t, y in enumerate(self.shares) if y > 0)

    @property
    def coded_support(self) -> Tuple[int, ...]:
        return tuple(t for t in self.support if t >= 1)

    def per_subfile(self) -> Tuple[float, ...]:
        """Per-subfile sizes x_t = y_t / C(K, t)."""
        a = multiplicities(self.users)
        return tuple(y / a[t] for t, y in enumerate(self.shares))

    def dominant_type(self) -> int:
        """Coded type holding the largest share (ties go to the larger type); 0 if nothing is cached."""
        coded = self.coded_support
        if not coded:
            return 0
        return max(coded, key=lambda t: (self.shares[t], t))


@dataclass(frozen=True)
class Thresholds:
    """
    Regime boundaries of a configuration.

    gamma and sigma are indexed t = 0..K; q is indexed t = 1..K and stored
    with q[0] holding q_1.
    """
    gamma: Tuple[float, ...]
    sigma: Tuple[float, ...]
    q: Tuple[float, ...]

    def coefficient(self, t: int) -> float:
        """q_t for t in 1..K."""
        if not 1 <= t <= len(self.q):
            raise DomainError(f"type {t} outside 1..{len(self.q)}")
        return self.q[t - 1]


def _check_allocation(config: SystemConfig, alloc: TypeAllocation):
    if alloc.users != config.users:
        raise ConfigError(f"allocation is for K={alloc.users}, configuration has K={config.users}")


def rate_placement(config: SystemConfig, alloc: TypeAllocation) -> float:
    """Placement-phase rate R_o = N * sum_{t>=1} c_t y_t, in file lengths."""
    _check_allocation(config, alloc)
    return float(config.files * np.dot(placement_costs(config), alloc.vector))


def objective_value(alloc: TypeAllocation) -> float:
    """Caching objective sum_t t/(t+1) * y_t."""
    return float(np.dot(objective_weights(alloc.users), alloc.vector))


def delivery_from_objective(users: int, objective: float) -> float:
    """Delivery rate through the identity R_p = K - (K+1) * objective."""
    return users - (users + 1) * objective


def rate_delivery(config: SystemConfig, alloc: TypeAllocation) -> float:
    """Worst-case delivery-phase rate R_p = sum_{t<K} b_t y_t, in file lengths."""
    _check_allocation(config, alloc)
    return float(np.dot(delivery_factors(config.users), alloc.vector))


def constraint_load(config: SystemConfig, alloc: TypeAllocation) -> float:
    """Left-hand side of the placement-cost constraint, sum_{t>=1} q_t y_t."""
    _check_allocation(config, alloc)
    return float(np.dot(constraint_coefficients(config), alloc.vector[1:]))


def is_feasible(config: SystemConfig, alloc: TypeAllocation) -> bool:
    """Both LP constraints hold within tolerance (non-negativity is enforced by TypeAllocation)."""
    return at_most(constraint_load(config, alloc), 1.0) and at_most(math.fsum(alloc.shares[1:]), 1.0)


def sigma_threshold(t: int, users: int) -> float:
    """alpha-boundary sigma_t; sigma_0 = 1 and sigma_K = 0."""
    if t == 0:
        return 1.0
    if t >= users:
        return 0.0
    return 1.0 + math.log((t + 1) / (t + 2)) / math.log((t + 1) / t)


def gamma_threshold(config: SystemConfig, t: int) -> float:
    """rho-boundary gamma_t at which q_t crosses one; gamma_0 = 1."""
    if t == 0:
        return 1.0
    K = config.users
    return (K - t) / (power(t, config.alpha) * (t + 1) * config.files)


def thresholds(config: SystemConfig) -> Thresholds:
    """Compute the gamma, sigma and q vectors of a configuration."""
    K = config.users
    return Thresholds(
        gamma=tuple(gamma_threshold(config, t) for t in range(K + 1)),
        sigma=tuple(sigma_threshold(t, K) for t in range(K + 1)),
        q=tuple(float(v) for v in constraint_coefficients(config)),
    )
