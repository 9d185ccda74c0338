"""
Oracle verification tools.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from cachecost.dispatch import execute_command, format_response
from cachecost.lp_oracle import check_claims
from cachecost.shared import mcp
from cachecost.tools.solve import SolveInput
from cachecost.verification import VerifyGrid, run_verification


class VerifyInput(BaseModel):
    """A verification grid over K, N, rho and alpha."""
    model_config = ConfigDict(str_strip_whitespace=True)
    users: List[int] = Field(default_factory=lambda: list(range(2, 9)), description="Values of K")
    file_multipliers: List[int] = Field(default_factory=lambda: [1, 2, 5], description="N as multiples of K")
    files: Optional[List[int]] = Field(default=None, description="Explicit N values (override multipliers)")
    rho_min: float = Field(default=0.0, ge=0)
    rho_max: float = Field(default=0.5, ge=0)
    rho_steps: int = Field(default=50, description="Points along rho", ge=1)
    alpha_min: float = Field(default=0.0, ge=0, le=1)
    alpha_max: float = Field(default=1.0, ge=0, le=1)
    alpha_steps: int = Field(default=50, description="Points along alpha", ge=1)

    def to_grid(self) -> VerifyGrid:
        return VerifyGrid(**self.model_dump())


@mcp.tool(
    name="cachecost_verify",
    annotations={"title": "Verify Against LP Oracle", "readOnlyHint": True, "idempotentHint": True}
)
async def cachecost_verify(params: VerifyInput) -> str:
    """
    Compare the closed-form optimum with exhaustive vertex enumeration on a grid.

    Returns:
        JSON summary: points checked, max objective discrepancy, allocation
        mismatches (beyond ties), invariant violations, corner-point claim pass
        counts, regime counts, and up to 20 offending configurations.
    """
    response = await execute_command("verify", lambda: run_verification(params.to_grid()).to_dict())
    return format_response(response)


@mcp.tool(
    name="cachecost_check_claims",
    annotations={"title": "Check Corner-Point Claims", "readOnlyHint": True, "idempotentHint": True}
)
async def cachecost_check_claims(params: SolveInput) -> str:
    """
    Check the corner-point claims for an ArchitectureLimited configuration.

    Returns an error for configurations in another regime.
    """
    response = await execute_command("check_claims", lambda: check_claims(params.to_config()).to_dict())
    return format_response(response)
