"""
Scheme simulation tool.
"""

from typing import List, Optional

from pydantic import Field

from cachecost.closed_form import solve
from cachecost.dispatch import execute_command, format_response
from cachecost.shared import mcp
from cachecost.simulation import simulate
from cachecost.tools.solve import SolveInput


class SimulateInput(SolveInput):
    """A configuration plus simulation settings."""
    file_length: Optional[int] = Field(default=None, description="File length F in bytes (default 2520*K)", ge=1)
    seed: Optional[int] = Field(default=None, description="Seed for the pseudorandom library")
    demand: Optional[List[int]] = Field(
        default=None,
        description="Requested file per user, 1-based and distinct (default 1..K)"
    )
    include_transcripts: bool = Field(default=False, description="Include per-transmission transcripts")


def _run(params: SimulateInput) -> dict:
    config = params.to_config()
    demand = None if params.demand is None else [d - 1 for d in params.demand]
    report = simulate(config, solve(config).allocation, params.file_length, params.seed, demand)
    return report.to_dict(include_transcripts=params.include_transcripts)


@mcp.tool(
    name="cachecost_simulate",
    annotations={"title": "Simulate Placement and Delivery", "readOnlyHint": True, "idempotentHint": True}
)
async def cachecost_simulate(params: SimulateInput) -> str:
    """
    Simulate the optimal scheme byte by byte and check it against the rate formulas.

    Returns:
        JSON with the quantized subfile sizes, measured vs formula rates and
        their deltas and bounds, and per-user decode results.
    """
    response = await execute_command("simulate", _run, params)
    return format_response(response)
