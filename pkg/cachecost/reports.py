"""JSON-ready result payloads shared by the CLI and the MCP tools."""

from typing import Any, Dict

from cachecost.closed_form import solve, uncoded_is_optimal
from cachecost.model import SystemConfig, thresholds
from cachecost.sweep import gain_record


def config_echo(config: SystemConfig) -> Dict[str, Any]:
    return {"users": config.users, "files": config.files, "rho": config.rho, "alpha": config.alpha}


def solve_report(config: SystemConfig) -> Dict[str, Any]:
    """Optimal solution plus the uncoded-optimality flag and the gain over uncoded delivery."""
    solution = solve(config)
    record = gain_record(config, solution)
    report = {"config": config_echo(config)}
    report.update(solution.to_dict())
    report["uncoded_is_optimal"] = uncoded_is_optimal(config)
    report["r_delivery_uncoded"] = record.r_delivery_uncoded
    report["gain"] = max(record.gain, 0.0)
    return report


def thresholds_report(config: SystemConfig) -> Dict[str, Any]:
    """gamma, sigma and q tables, one row per type."""
    th = thresholds(config)
    rows = []
    for t in range(config.users + 1):
        rows.append({
            "t": t,
            "gamma": th.gamma[t],
            "sigma": th.sigma[t],
            "q": th.coefficient(t) if t >= 1 else None,
        })
    return {"config": config_echo(config), "types": rows}
