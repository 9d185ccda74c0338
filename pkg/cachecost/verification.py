"""
Grid verification of the closed form against the vertex oracle.

At every grid point the closed-form solution is compared with the oracle's
best vertex, checked for the solution invariants and the uncoded-optimality
predicate, and, in the ArchitectureLimited regime, the corner-point claims
are re-checked by enumeration.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cachecost.closed_form import (
    RegimeTag,
    solution_violations,
    solve,
    uncoded_is_optimal,
)
from cachecost.config import config as settings
from cachecost.lp_oracle import check_claims, oracle_solve
from cachecost.model import SystemConfig, make_config

logger = logging.getLogger(__name__)

MAX_OFFENDERS = 20


class VerifyGrid(BaseModel):
    """Grid of configurations to verify."""
    model_config = ConfigDict(frozen=True)

    users: List[int] = Field(default_factory=lambda: list(range(2, 9)), description="Values of K")
    file_multipliers: List[int] = Field(
        default_factory=lambda: [1, 2, 5],
        description="N values as multiples of K (ignored when files is given)"
    )
    files: Optional[List[int]] = Field(default=None, description="Explicit N values")
    rho_min: float = Field(default=0.0, ge=0)
    rho_max: float = Field(default=0.5, ge=0)
    rho_steps: int = Field(default=50, ge=1)
    alpha_min: float = Field(default=0.0, ge=0, le=1)
    alpha_max: float = Field(default=1.0, ge=0, le=1)
    alpha_steps: int = Field(default=50, ge=1)
    allow_rho_gt_1: bool = False

    @model_validator(mode="after")
    def _check_grid(self) -> "VerifyGrid":
        if not self.users:
            raise ValueError("grid has no user counts")
        if self.files is not None and not self.files:
            raise ValueError("grid has no file counts")
        if self.files is None and not self.file_multipliers:
            raise ValueError("grid has no file multipliers")
        if self.rho_min > self.rho_max or self.alpha_min > self.alpha_max:
            raise ValueError("grid axis minimum exceeds maximum")
        return self

    def file_counts(self, users: int) -> List[int]:
        if self.files is not None:
            return [n for n in self.files if n >= users]
        return [m * users for m in self.file_multipliers]

    def configs(self) -> Iterator[SystemConfig]:
        rhos = np.linspace(self.rho_min, self.rho_max, self.rho_steps)
        alphas = np.linspace(self.alpha_min, self.alpha_max, self.alpha_steps)
        for users in self.users:
            for files in self.file_counts(users):
                for rho in rhos:
                    for alpha in alphas:
                        yield make_config(users, files, float(rho), float(alpha), self.allow_rho_gt_1)


@dataclass
class PointCheck:
    """Verification outcome at one configuration."""
    config: SystemConfig
    discrepancy: float
    allocation_gap: float
    regime: RegimeTag
    violations: List[str]
    claims_hold: Optional[bool] = None

    @property
    def tie(self) -> bool:
        """Allocations differ while objectives agree."""
        return self.allocation_gap > settings.TOLERANCE and self.discrepancy <= settings.TOLERANCE

    @property
    def mismatch(self) -> bool:
        return self.allocation_gap > settings.TOLERANCE and self.discrepancy > settings.TOLERANCE

    @property
    def ok(self) -> bool:
        return (self.discrepancy <= settings.TOLERANCE and not self.violations
                and self.claims_hold is not False)


def verify_point(config: SystemConfig) -> PointCheck:
    closed = solve(config)
    oracle = oracle_solve(config)
    violations = solution_violations(config, closed)
    if uncoded_is_optimal(config) and not set(closed.coded_support) <= {config.users}:
        violations.append(f"uncoded delivery predicted optimal but support is {closed.support}")
    claims = None
    if closed.regime.tag is RegimeTag.ARCHITECTURE_LIMITED:
        claims = check_claims(config).all_hold
    gap = float(np.max(np.abs(closed.allocation.vector - oracle.allocation.vector)))
    return PointCheck(
        config=config,
        discrepancy=abs(closed.objective - oracle.objective),
        allocation_gap=gap,
        regime=closed.regime.tag,
        violations=violations,
        claims_hold=claims,
    )


@dataclass
class VerificationSummary:
    points: int = 0
    max_discrepancy: float = 0.0
    mismatches: int = 0
    tie_mismatches: int = 0
    invariant_violations: int = 0
    claims_checked: int = 0
    claims_passed: int = 0
    regime_counts: Dict[str, int] = field(default_factory=dict)
    offenders: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.points > 0 and self.max_discrepancy <= settings.TOLERANCE
                and self.mismatches == 0 and self.invariant_violations == 0
                and self.claims_passed == self.claims_checked)

    def record(self, check: PointCheck):
        self.points += 1
        self.max_discrepancy = max(self.max_discrepancy, check.discrepancy)
        self.mismatches += check.mismatch
        self.tie_mismatches += check.tie
        self.invariant_violations += bool(check.violations)
        self.regime_counts[check.regime.value] = self.regime_counts.get(check.regime.value, 0) + 1
        if check.claims_hold is not None:
            self.claims_checked += 1
            self.claims_passed += check.claims_hold
        if not check.ok and len(self.offenders) < MAX_OFFENDERS:
            c = check.config
            self.offenders.append({
                "users": c.users, "files": c.files, "rho": c.rho, "alpha": c.alpha,
                "discrepancy": check.discrepancy,
                "violations": check.violations,
                "claims_hold": check.claims_hold,
            })

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": self.points,
            "max_discrepancy": self.max_discrepancy,
            "mismatches": self.mismatches,
            "tie_mismatches": self.tie_mismatches,
            "invariant_violations": self.invariant_violations,
            "claims_checked": self.claims_checked,
            "claims_passed": self.claims_passed,
            "regime_counts": dict(self.regime_counts),
            "passed": self.passed,
            "offenders": list(self.offenders),
        }


def run_verification(grid: VerifyGrid) -> VerificationSummary:
    """Verify every configuration of a grid."""
    summary = VerificationSummary()
    for config in grid.configs():
        check = verify_point(config)
        summary.record(check)
        if not check.ok:
            logger.warning(f"verification failed at K={config.users} N={config.files} "
                           f"rho={config.rho} alpha={config.alpha}: {check.violations}")
    logger.info(f"verified {summary.points} points: max discrepancy {summary.max_discrepancy:.3g}, "
                f"claims {summary.claims_passed}/{summary.claims_checked}")
    return summary
