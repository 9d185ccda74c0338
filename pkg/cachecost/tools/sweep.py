"""
Sweep dataset tool.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from cachecost.config import config
from cachecost.dispatch import execute_command, format_response
from cachecost.errors import ConfigError
from cachecost.shared import mcp
from cachecost.sweep import SweepAxis, SweepSpec, preset, run_sweep, with_overrides, write_dataset


class SweepInput(BaseModel):
    """A sweep given by preset or by explicit axes."""
    model_config = ConfigDict(str_strip_whitespace=True)
    preset: Optional[Literal["type-map", "file-count", "gain-map"]] = Field(default=None, description="Named sweep setup")
    users: Optional[int] = Field(default=None, description="Number of users K", ge=1, le=64)
    files: Optional[int] = Field(default=None, description="Fixed N unless swept", ge=1)
    rho: Optional[float] = Field(default=None, description="Fixed rho unless swept", ge=0)
    alpha: Optional[float] = Field(default=None, description="Fixed alpha unless swept", ge=0, le=1)
    axes: Optional[List[SweepAxis]] = Field(default=None, description="Two axes among alpha, rho, files")
    output: str = Field(default="sweep.csv", description="Output file name (.csv or .json) inside the output directory")
    workers: int = Field(default=1, description="Parallel worker processes", ge=1, le=64)

    def to_spec(self) -> SweepSpec:
        if self.preset:
            if self.axes:
                raise ConfigError("axes cannot be combined with a preset")
            return with_overrides(preset(self.preset), users=self.users, files=self.files,
                                  rho=self.rho, alpha=self.alpha)
        return SweepSpec(users=self.users, files=self.files, rho=self.rho, alpha=self.alpha, axes=self.axes or [])


def _run(params: SweepInput) -> dict:
    spec = params.to_spec()
    out = config.output_path(params.output)
    rows = run_sweep(spec, workers=params.workers)
    path, manifest = write_dataset(spec, rows, out)
    return {"rows": len(rows), "columns": spec.columns(), "output": str(path), "manifest": str(manifest)}


@mcp.tool(
    name="cachecost_sweep",
    annotations={"title": "Sweep Parameters", "readOnlyHint": False, "destructiveHint": False}
)
async def cachecost_sweep(params: SweepInput) -> str:
    """
    Evaluate the optimum over a two-axis grid and write a plot-ready dataset.

    Presets: type-map (rho x alpha, K=5, N=10), file-count (N x alpha, K=5, rho=0.05),
    gain-map (alpha x rho with gain, K=5, N=10).

    Returns:
        JSON with row count, columns and the dataset and manifest paths.
    """
    response = await execute_command("sweep", _run, params)
    return format_response(response)
