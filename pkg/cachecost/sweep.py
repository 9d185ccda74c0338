"""
Parameter sweeps over (alpha, rho, N) producing plot-ready datasets.

A sweep evaluates the closed-form optimum on a two-axis grid and records the
regime, support, dominant type, both rates and the gain over the best
uncoded-delivery allocation. Rows come out in row-major order over the axes
regardless of how many workers evaluate them. A JSON manifest next to the
dataset records the spec and tool version.
"""

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import partial
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cachecost import __version__
from cachecost.closed_form import OptimalSolution, solution_violations, solve, uncoded_solution
from cachecost.config import config as settings
from cachecost.errors import ConfigError, InvariantError
from cachecost.model import SystemConfig, make_config

logger = logging.getLogger(__name__)

AxisName = Literal["alpha", "rho", "files"]
OutputName = Literal["type", "support", "rates", "gain"]

OUTPUT_COLUMNS = {
    "type": ["dominant_type"],
    "support": ["support"],
    "rates": ["r_placement", "r_delivery"],
    "gain": ["r_delivery_uncoded", "gain"],
}


class SweepAxis(BaseModel):
    """One grid axis: evenly spaced min..max in steps, or explicit values."""
    model_config = ConfigDict(frozen=True)

    name: AxisName = Field(..., description="Swept parameter")
    min: Optional[float] = Field(default=None, description="Lower end")
    max: Optional[float] = Field(default=None, description="Upper end")
    steps: int = Field(default=2, description="Number of grid points", ge=2)
    values: Optional[List[float]] = Field(default=None, description="Explicit grid values")

    @model_validator(mode="after")
    def _check_axis(self) -> "SweepAxis":
        if self.values is not None:
            if len(self.values) < 2:
                raise ValueError(f"axis {self.name} needs at least two values")
            if self.name == "files" and any(v != int(v) for v in self.values):
                raise ValueError("files axis values must be integers")
        elif self.min is None or self.max is None or not self.min < self.max:
            raise ValueError(f"axis {self.name} needs min < max")
        return self

    def points(self) -> List[float]:
        if self.values is not None:
            raw = list(self.values)
        elif self.name == "files":
            raw = sorted({int(round(v)) for v in np.linspace(self.min, self.max, self.steps)})
        else:
            raw = [float(v) for v in np.linspace(self.min, self.max, self.steps)]
        if self.name == "files":
            return [int(v) for v in raw]
        return [float(v) for v in raw]


class SweepSpec(BaseModel):
    """A two-axis sweep; parameters not swept are fixed."""
    model_config = ConfigDict(frozen=True)

    users: int = Field(..., description="Number of users K", ge=1)
    files: Optional[int] = Field(default=None, description="Fixed N (unless swept)", ge=1)
    rho: Optional[float] = Field(default=None, description="Fixed rho (unless swept)", ge=0)
    alpha: Optional[float] = Field(default=None, description="Fixed alpha (unless swept)", ge=0, le=1)
    axes: List[SweepAxis] = Field(..., description="Exactly two axes", min_length=2, max_length=2)
    outputs: List[OutputName] = Field(default_factory=lambda: ["type", "support", "rates", "gain"])
    allow_rho_gt_1: bool = False

    @model_validator(mode="after")
    def _check_spec(self) -> "SweepSpec":
        names = [axis.name for axis in self.axes]
        if len(set(names)) != 2:
            raise ValueError(f"sweep axes must differ, got {names}")
        for name in ("alpha", "rho", "files"):
            if name not in names and getattr(self, name) is None:
                raise ValueError(f"{name} must be fixed or swept")
        file_counts = self.axis("files").points() if "files" in names else [self.files]
        if any(self.users > n for n in file_counts):
            raise ValueError(f"users ({self.users}) exceeds a swept file count {file_counts}")
        return self

    def axis(self, name: str) -> SweepAxis:
        return next(axis for axis in self.axes if axis.name == name)

    def grid(self) -> List[Tuple[float, ...]]:
        """Grid points in row-major order (first axis outermost)."""
        return list(product(*(axis.points() for axis in self.axes)))

    def config_at(self, point: Sequence[float]) -> SystemConfig:
        values = {"files": self.files, "rho": self.rho, "alpha": self.alpha}
        for axis, value in zip(self.axes, point):
            values[axis.name] = value
        return make_config(self.users, int(values["files"]), float(values["rho"]),
                           float(values["alpha"]), self.allow_rho_gt_1)

    def columns(self) -> List[str]:
        columns = [axis.name for axis in self.axes] + ["regime"]
        for output in ("type", "support", "rates", "gain"):
            if output in self.outputs:
                columns.extend(OUTPUT_COLUMNS[output])
        return columns


@dataclass(frozen=True)
class GainRecord:
    """Delivery-rate reduction of the optimum over the best uncoded-delivery allocation."""
    config: SystemConfig
    r_delivery_opt: float
    r_delivery_uncoded: float

    @property
    def gain(self) -> float:
        return self.r_delivery_uncoded - self.r_delivery_opt


def gain_record(config: SystemConfig, solution: Optional[OptimalSolution] = None) -> GainRecord:
    solution = solution or solve(config)
    return GainRecord(
        config=config,
        r_delivery_opt=solution.r_delivery,
        r_delivery_uncoded=uncoded_solution(config).r_delivery,
    )


def evaluate_point(spec: SweepSpec, point: Sequence[float]) -> Dict[str, Any]:
    """Solve one grid point and re-validate the result before it is emitted."""
    config = spec.config_at(point)
    solution = solve(config)
    problems = solution_violations(config, solution)
    record = gain_record(config, solution)
    if record.gain < -settings.TOLERANCE:
        problems.append(f"negative gain {record.gain!r}")
    if problems:
        raise InvariantError(f"invalid solution at {dict(zip([a.name for a in spec.axes], point))}: {problems}")
    row = {axis.name: value for axis, value in zip(spec.axes, point)}
    row.update({
        "regime": solution.regime.tag.value,
        "dominant_type": solution.dominant_type,
        "support": ";".join(str(t) for t in solution.support),
        "r_placement": solution.r_placement,
        "r_delivery": solution.r_delivery,
        "r_delivery_uncoded": record.r_delivery_uncoded,
        "gain": max(record.gain, 0.0),
    })
    return row


def run_sweep(spec: SweepSpec, workers: int = 1) -> List[Dict[str, Any]]:
    """Evaluate every grid point; rows are returned in row-major order."""
    points = spec.grid()
    logger.info(f"sweep over {' x '.join(a.name for a in spec.axes)}: {len(points)} points, {workers} worker(s)")
    evaluate = partial(evaluate_point, spec)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, points, chunksize=max(1, len(points) // (workers * 4))))
    else:
        rows = [evaluate(point) for point in points]
    return rows


def _format(value: Any, digits: int) -> str:
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def write_dataset(spec: SweepSpec, rows: List[Dict[str, Any]], path: Path) -> Tuple[Path, Path]:
    """Write rows as CSV (or JSON for a .json path) plus a sidecar manifest; returns both paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = spec.columns()
    digits = settings.CSV_DIGITS

    if path.suffix.lower() == ".json":
        with open(path, "w", encoding="utf-8") as f:
            json.dump([{c: row[c] for c in columns} for row in rows], f, indent=2)
            f.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format(row[c], digits) for c in columns])

    manifest_path = path.with_name(f"{path.stem}.manifest.json")
    manifest = {
        "spec": spec.model_dump(mode="json"),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "row_count": len(rows),
    }
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    logger.info(f"wrote {len(rows)} rows to {path} (manifest {manifest_path})")
    return path, manifest_path


def preset(name: str) -> SweepSpec:
    """Named sweeps over the K=5 reference system."""
    alpha_axis = SweepAxis(name="alpha", min=0.0, max=1.0, steps=101)
    rho_axis = SweepAxis(name="rho", min=0.0, max=0.3, steps=61)
    if name == "type-map":
        return SweepSpec(users=5, files=10, axes=[rho_axis, alpha_axis], outputs=["type", "support", "rates"])
    if name == "file-count":
        files_axis = SweepAxis(name="files", values=[5, 10, 20, 50, 100])
        return SweepSpec(users=5, rho=0.05, axes=[files_axis, alpha_axis], outputs=["type", "support", "rates"])
    if name == "gain-map":
        return SweepSpec(users=5, files=10, axes=[alpha_axis, rho_axis], outputs=["type", "rates", "gain"])
    raise ConfigError(f"unknown preset {name!r} (expected type-map, file-count or gain-map)")


def with_overrides(spec: SweepSpec, **values: Any) -> SweepSpec:
    """Replace fixed parameters or outputs of a spec; a swept parameter cannot be fixed."""
    values = {key: value for key, value in values.items() if value is not None}
    swept = sorted({axis.name for axis in spec.axes} & set(values))
    if swept:
        raise ConfigError(f"{', '.join(swept)} is swept by this spec and cannot be fixed")
    return SweepSpec(**{**spec.model_dump(), **values})
