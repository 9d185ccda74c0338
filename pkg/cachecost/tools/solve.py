"""
Closed-form solver tools.
"""

from pydantic import BaseModel, ConfigDict, Field

from cachecost.dispatch import execute_command, format_response
from cachecost.model import make_config
from cachecost.reports import solve_report, thresholds_report
from cachecost.shared import mcp


class SolveInput(BaseModel):
    """A single system configuration."""
    model_config = ConfigDict(str_strip_whitespace=True)
    users: int = Field(..., description="Number of users K", ge=1, le=64)
    files: int = Field(..., description="Number of files N (must be >= users)", ge=1)
    rho: float = Field(..., description="Linear placement cost multiplier, in [0, 1]", ge=0)
    alpha: float = Field(..., description="Architecture cost exponent, in [0, 1] (0 = shared medium, 1 = TDMA)", ge=0, le=1)
    allow_rho_gt_1: bool = Field(default=False, description="Accept rho > 1 for exploration")

    def to_config(self):
        return make_config(self.users, self.files, self.rho, self.alpha, self.allow_rho_gt_1)


@mcp.tool(
    name="cachecost_solve",
    annotations={"title": "Solve Optimal Placement", "readOnlyHint": True, "idempotentHint": True}
)
async def cachecost_solve(params: SolveInput) -> str:
    """
    Compute the optimal caching allocation for a configuration.

    Returns:
        JSON with regime (and a, b for ArchitectureLimited), support, y and x
        vectors, objective, placement rate R_o, delivery rate R_p, the active
        thresholds, whether uncoded delivery is optimal, and the gain over the
        best uncoded-delivery allocation.
    """
    response = await execute_command("solve", lambda: solve_report(params.to_config()))
    return format_response(response)


@mcp.tool(
    name="cachecost_thresholds",
    annotations={"title": "Regime Thresholds", "readOnlyHint": True, "idempotentHint": True}
)
async def cachecost_thresholds(params: SolveInput) -> str:
    """
    List gamma_t (rho boundaries), sigma_t (alpha boundaries) and q_t for t = 0..K.

    q_t <= 1 exactly when rho <= gamma_t.
    """
    response = await execute_command("thresholds", lambda: thresholds_report(params.to_config()))
    return format_response(response)
