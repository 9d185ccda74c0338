"""
Command-line interface for cachecost.

Subcommands:
- solve: closed-form optimum for one configuration
- thresholds: gamma/sigma/q tables for one configuration
- verify: closed form vs vertex oracle over a grid, plus corner-point claims
- simulate: byte-level placement/delivery run at the optimum
- sweep: sweep datasets (CSV or JSON) with a manifest

Exit codes: 0 success, 1 usage, 2 verification/decode failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from cachecost import __version__
from cachecost.closed_form import solve
from cachecost.config import config as settings
from cachecost.errors import CacheCostError, ConfigError, DecodeError, InvariantError
from cachecost.model import SystemConfig, make_config
from cachecost.reports import solve_report, thresholds_report
from cachecost.simulation import simulate
from cachecost.sweep import SweepAxis, SweepSpec, preset, run_sweep, with_overrides, write_dataset
from cachecost.verification import VerifyGrid, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_IO = 3

CONFIG_KEYS = ("users", "files", "rho", "alpha", "allow_rho_gt_1")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    """Parse "2,3,5" or "2-8" into a list of ints."""
    try:
        if "-" in text and "," not in text:
            low, high = (int(v) for v in text.split("-", 1))
            return list(range(low, high + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list like 2,3,5 or a range like 2-8, got {text!r}")


def _axis(text: str) -> SweepAxis:
    """Parse NAME:MIN:MAX:STEPS or NAME:v1,v2,... into a sweep axis."""
    try:
        name, rest = text.split(":", 1)
        if "," in rest:
            return SweepAxis(name=name, values=[float(v) for v in rest.split(",")])
        low, high, steps = rest.split(":")
        return SweepAxis(name=name, min=float(low), max=float(high), steps=int(steps))
    except (ValueError, ValidationError) as e:
        raise argparse.ArgumentTypeError(f"bad axis {text!r}: {e}")


def create_parser() -> argparse.ArgumentParser:
    """
    Create command-line argument parser with subcommands.

    Returns:
        Configured ArgumentParser instance
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with users/files/rho/alpha; flags win")
    common.add_argument("--allow-rho-gt-1", action="store_true", default=None,
                        help="Accept rho > 1 (outside the modelled range)")
    common.add_argument("--json", action="store_true", help="Print JSON instead of a table")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    instance = argparse.ArgumentParser(add_help=False)
    instance.add_argument("--users", "-k", type=int, help="Number of users K")
    instance.add_argument("--files", "-n", type=int, help="Number of files N (N >= K)")
    instance.add_argument("--rho", type=float, help="Linear placement cost multiplier")
    instance.add_argument("--alpha", type=float, help="Architecture cost exponent")

    parser = CliParser(
        prog="cachecost",
        description="Optimal coded caching with placement cost",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  cachecost solve -k 5 -n 10 --rho 0.1 --alpha 1
  cachecost thresholds -k 5 -n 10 --alpha 1
  cachecost verify --users 2-8 --file-multipliers 1,2,5
  cachecost simulate -k 5 -n 10 --rho 0.1 --alpha 1 --file-length 600
  cachecost sweep --preset type-map --out results/type-map.csv
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    subparsers.add_parser("solve", parents=[common, instance], help="Optimal allocation for one configuration")
    subparsers.add_parser("thresholds", parents=[common, instance], help="gamma/sigma/q tables (rho defaults to 0)")

    verify = subparsers.add_parser("verify", parents=[common], help="Closed form vs LP oracle on a grid")
    verify.add_argument("--users", "-k", type=_int_list, default=None, help="K values, e.g. 2-8 or 2,4 (default 2-8)")
    verify.add_argument("--files", "-n", type=_int_list, default=None, help="Explicit N values")
    verify.add_argument("--file-multipliers", type=_int_list, default=None, help="N as multiples of K (default 1,2,5)")
    verify.add_argument("--rho", type=float, help="Single rho value")
    verify.add_argument("--alpha", type=float, help="Single alpha value")
    verify.add_argument("--rho-range", type=float, nargs=3, metavar=("MIN", "MAX", "STEPS"), help="rho grid")
    verify.add_argument("--alpha-range", type=float, nargs=3, metavar=("MIN", "MAX", "STEPS"), help="alpha grid")

    sim = subparsers.add_parser("simulate", parents=[common, instance], help="Byte-level scheme simulation")
    sim.add_argument("--file-length", "-F", type=int, help="File length in bytes (default 2520*K)")
    sim.add_argument("--seed", type=int, default=None, help=f"Library seed (default {settings.DEFAULT_SEED})")
    sim.add_argument("--demand", type=_int_list, help="Requested files, 1-based and distinct (default 1..K)")
    sim.add_argument("--transcript", type=Path, help="Write both transcripts as JSON to this path")

    sweep = subparsers.add_parser("sweep", parents=[common, instance], help="Sweep datasets")
    sweep.add_argument("--preset", choices=["type-map", "file-count", "gain-map"], help="Named sweep setup")
    sweep.add_argument("--axis", type=_axis, action="append", default=None,
                       help="NAME:MIN:MAX:STEPS or NAME:v1,v2,... (twice)")
    sweep.add_argument("--outputs", default=None, help="Comma list of type,support,rates,gain")
    sweep.add_argument("--out", type=Path, default=None, help="Output path (.csv or .json)")
    sweep.add_argument("--workers", type=int, default=1, help="Parallel worker processes")
    return parser


def _load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return data


def _merged(args: argparse.Namespace, keys: Sequence[str]) -> Dict[str, Any]:
    """Flag values override the config file."""
    values = _load_config_file(args.config)
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _system_config(args: argparse.Namespace, rho_default: Optional[float] = None) -> SystemConfig:
    values = _merged(args, CONFIG_KEYS)
    if rho_default is not None:
        values.setdefault("rho", rho_default)
    missing = [k for k in ("users", "files", "rho", "alpha") if values.get(k) is None]
    if missing:
        raise ConfigError(f"missing parameters: {', '.join('--' + m for m in missing)}")
    return make_config(values["users"], values["files"], values["rho"], values["alpha"],
                       bool(values.get("allow_rho_gt_1", False)))


def _print_json(payload: Any):
    print(json.dumps(payload, indent=2))


def cmd_solve(args: argparse.Namespace) -> int:
    report = solve_report(_system_config(args))
    if args.json:
        _print_json(report)
        return EXIT_OK
    regime = report["regime"] + (f" (a={report['a']}, b={report['b']})" if report["a"] else "")
    print(f"Regime:   {regime}")
    print(f"Support:  {{{', '.join(str(t) for t in report['support'])}}}")
    print(f"{'t':>3}  {'y_t':>14}  {'x_t':>14}")
    for t, (y, x) in enumerate(zip(report["y"], report["x"])):
        print(f"{t:>3}  {y:>14.9g}  {x:>14.9g}")
    print(f"R_o = {report['r_placement']:.9g}")
    print(f"R_p = {report['r_delivery']:.9g}")
    print(f"Uncoded delivery optimal: {'yes' if report['uncoded_is_optimal'] else 'no'}")
    print(f"Gain over uncoded delivery: {report['gain']:.9g}")
    return EXIT_OK


def cmd_thresholds(args: argparse.Namespace) -> int:
    report = thresholds_report(_system_config(args, rho_default=0.0))
    if args.json:
        _print_json(report)
        return EXIT_OK
    print(f"{'t':>3}  {'gamma_t':>14}  {'sigma_t':>14}  {'q_t':>14}")
    for row in report["types"]:
        q = "" if row["q"] is None else f"{row['q']:.9g}"
        print(f"{row['t']:>3}  {row['gamma']:>14.9g}  {row['sigma']:>14.9g}  {q:>14}")
    return EXIT_OK


def _verify_grid(args: argparse.Namespace) -> VerifyGrid:
    values = _load_config_file(args.config)
    grid: Dict[str, Any] = {}
    users = args.users if args.users is not None else values.get("users")
    if users is not None:
        grid["users"] = users if isinstance(users, list) else [users]
    files = args.files if args.files is not None else values.get("files")
    if files is not None:
        grid["files"] = files if isinstance(files, list) else [files]
    if args.file_multipliers is not None:
        grid["file_multipliers"] = args.file_multipliers
    for name, single, span in (("rho", args.rho, args.rho_range), ("alpha", args.alpha, args.alpha_range)):
        single = single if single is not None else values.get(name)
        if span is not None:
            grid[f"{name}_min"], grid[f"{name}_max"], steps = span
            grid[f"{name}_steps"] = int(steps)
        elif single is not None:
            grid[f"{name}_min"] = grid[f"{name}_max"] = single
            grid[f"{name}_steps"] = 1
    if args.allow_rho_gt_1:
        grid["allow_rho_gt_1"] = True
    return VerifyGrid(**grid)


def cmd_verify(args: argparse.Namespace) -> int:
    summary = run_verification(_verify_grid(args))
    if args.json:
        _print_json(summary.to_dict())
    else:
        print(f"Points checked:          {summary.points}")
        print(f"Max objective gap:       {summary.max_discrepancy:.3g}")
        print(f"Allocation mismatches:   {summary.mismatches} (ties: {summary.tie_mismatches})")
        print(f"Invariant violations:    {summary.invariant_violations}")
        print(f"Claims passed:           {summary.claims_passed}/{summary.claims_checked}")
        for offender in summary.offenders:
            print(f"  FAILED {offender}")
        print("PASS" if summary.passed else "FAIL")
    return EXIT_OK if summary.passed else EXIT_FAILURE


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _system_config(args)
    demand = None if args.demand is None else [d - 1 for d in args.demand]
    report = simulate(config, solve(config).allocation, args.file_length, args.seed, demand)
    if args.transcript is not None:
        args.transcript.parent.mkdir(parents=True, exist_ok=True)
        with open(args.transcript, "w", encoding="utf-8") as f:
            json.dump([report.placement.to_dict(), report.delivery.to_dict()], f, indent=2)
        logger.info(f"transcripts written to {args.transcript}")
    if args.json:
        _print_json(report.to_dict())
    else:
        print(f"File length F: {report.quantized.file_length}")
        print(f"Subfile sizes s_t: {list(report.quantized.sizes)}")
        for phase, measured, formula, delta, bound in (
            ("R_o", report.placement.measured_cost, report.formula_placement, report.placement_delta, report.placement_bound),
            ("R_p", report.delivery.measured_cost, report.formula_delivery, report.delivery_delta, report.delivery_bound),
        ):
            print(f"{phase}: measured {measured:.9g}  formula {formula:.9g}  delta {delta:.3g}  bound {bound:.3g}")
        print(f"Decoded: {sum(report.decoded)}/{len(report.decoded)}")
        print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAILURE


def _sweep_spec(args: argparse.Namespace) -> SweepSpec:
    values = _merged(args, CONFIG_KEYS)
    if args.outputs:
        values["outputs"] = [v.strip() for v in args.outputs.split(",")]
    if args.preset:
        if args.axis is not None:
            raise ConfigError("--axis cannot be combined with --preset")
        return with_overrides(preset(args.preset), **values)
    if args.axis is not None:
        values["axes"] = args.axis
    return SweepSpec(**values)


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _sweep_spec(args)
    rows = run_sweep(spec, workers=args.workers)
    out = args.out or settings.output_path(f"{args.preset or 'sweep'}.csv")
    path, manifest = write_dataset(spec, rows, out)
    if args.json:
        _print_json({"rows": len(rows), "output": str(path), "manifest": str(manifest)})
    else:
        print(f"Wrote {len(rows)} rows to {path}")
        print(f"Manifest: {manifest}")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "thresholds": cmd_thresholds,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler()]
    )

    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        print(f"cachecost: invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DecodeError, InvariantError) as e:
        print(f"cachecost: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except CacheCostError as e:
        print(f"cachecost: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"cachecost: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as e:
        print(f"cachecost: invalid config file: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
