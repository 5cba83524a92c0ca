"""Command-line front end.

Every invocation is captured as a RunConfig; `run --config` replays one exactly.
Data records go to stdout, logs to stderr.

Exit status: 0 success, 1 a check failed, 2 usage or precondition error, 3 I/O error.
"""
import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from pydantic import BaseModel, ValidationError

from app.config import SETTINGS, configure_logging
from app.errors import CertificationError, PreconditionError, RamseyError, StorageError
from app.geometry import bounds, storage
from app.geometry.battery import (
    blue_run_reports,
    blue_search_report,
    bounds_rows,
    build_report,
    make_coloring,
    red_search_report,
    sweep_row,
    verification_battery,
)
from app.geometry.separated import Strategy
from app.geometry.torus import as_coords
from app.schemas.coloring import ColorResponse
from app.schemas.run import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
FORMATS = ("text", "json-lines", "csv")
GLOBAL_KEYS = {"subcommand", "seed", "format", "workers", "save_config", "log_level", "config"}


class Outcome(NamedTuple):
    records: List[BaseModel]
    status: int = EXIT_OK
    text: Optional[str] = None  # replaces the text rendering when set


def _floats(value: str) -> List[float]:
    return [float(v) for v in value.split(",") if v.strip()]


def _ints(value: str) -> List[int]:
    return [int(v) for v in value.split(",") if v.strip()]


def _k_points(value: str) -> List[List[float]]:
    """'0,0;1,0;2,0' -> [[0, 0], [1, 0], [2, 0]]"""
    return [_floats(row) for row in value.split(";") if row.strip()]


# Rendering

def _flat(record: BaseModel) -> Dict[str, Any]:
    row = {}
    for key, value in record.model_dump(mode="json").items():
        row[key] = json.dumps(value, separators=(",", ":")) if isinstance(value, (dict, list)) else value
    return row


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "text" and outcome.text is not None:
        return outcome.text + "\n"
    if fmt == "json-lines":
        return "".join(json.dumps(r.model_dump(mode="json"), sort_keys=True, separators=(",", ":")) + "\n"
                       for r in outcome.records)
    if fmt == "csv":
        if not outcome.records:
            return ""
        rows = [_flat(r) for r in outcome.records]
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buffer.getvalue()
    blocks = []
    for record in outcome.records:
        blocks.append("\n".join(f"{k}: {v}" for k, v in _flat(record).items()))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# Subcommands

def cmd_build(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    coloring = make_coloring(
        opts["n"], opts["R"], config.seed, t=opts.get("t"), x=opts.get("x"),
        strategy=Strategy(opts.get("strategy") or Strategy.RANDOM_DARTS.value),
        allow_small_R=bool(opts.get("allow_small_R")), max_darts=opts.get("max_darts"),
    )
    storage.write_coloring(coloring, opts["out"])
    return Outcome([build_report(coloring)])


def cmd_color(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    coloring = storage.read_coloring(opts["coloring"])
    point = _floats(opts["at"])
    color = coloring.color(as_coords(point, coloring.spec))
    return Outcome([ColorResponse(point=point, color=color.value)], text=color.value)


def cmd_verify(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    coloring = storage.read_coloring(opts["coloring"])
    report = verification_battery(coloring, reverify=True)
    return Outcome([report], EXIT_OK if report.passed else EXIT_FAILED)


def cmd_search_red(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    coloring = storage.read_coloring(opts["coloring"])
    trials = opts.get("trials") or SETTINGS["search"]["red_trials"]
    report = red_search_report(coloring, trials, config.seed, config.workers, bool(opts.get("timing")))
    return Outcome([report], EXIT_FAILED if report.found else EXIT_OK)


def cmd_search_blue(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    coloring = storage.read_coloring(opts["coloring"])
    trials = opts.get("trials") or SETTINGS["search"]["blue_trials"]
    k_points = _k_points(opts["k"]) if opts.get("k") else None
    return Outcome([blue_search_report(coloring, opts.get("m") or 2, trials, config.seed, config.workers,
                                       k_points, bool(opts.get("timing")))])


def cmd_exact_1d(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    coloring = storage.read_coloring(opts["coloring"])
    return Outcome(blue_run_reports(coloring, opts.get("m_max"), opts.get("trials"), config.seed, config.workers))


def cmd_bounds(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    n, R = opts.get("n"), opts.get("R")
    if opts.get("sign_pattern"):
        M, N, D = opts["sign_pattern"]
        return Outcome([bounds.sign_pattern_response(M, int(N), int(D))])
    if n is None:
        raise PreconditionError("bounds needs --n")
    if opts.get("ell_m"):
        return Outcome([bounds.ell_m_feasibility(n, opts["ell_m"])])
    if R is None:
        raise PreconditionError("bounds needs --n and --R")
    if opts.get("count_bound"):
        return Outcome([bounds.count_bound_response(n, R)])
    if opts.get("min_k"):
        response = bounds.min_k_response(n, R)
        return Outcome([response, bounds.theorem_feasibility(n, R, response.min_K)])
    if opts.get("K") is None:
        raise PreconditionError("bounds needs --K, --min-k, --ell-m, --count-bound or --sign-pattern")
    return Outcome([bounds.theorem_feasibility(n, R, opts["K"], opts.get("d"))])


def cmd_sweep(opts: Dict[str, Any], config: RunConfig) -> Outcome:
    ns, Rs = opts["n"], opts["R"]
    if opts.get("mode") == "bounds":
        return Outcome(list(bounds_rows(ns, Rs)))
    xs = opts.get("x") or [None]
    seeds = opts.get("seeds") or [config.seed]
    trials = opts.get("trials") or SETTINGS["search"]["blue_trials"]
    rows = []
    for n in ns:
        for R in Rs:
            for x in xs:
                for seed in seeds:
                    coloring = make_coloring(n, R, seed, t=opts.get("t"), x=x, max_darts=opts.get("max_darts"))
                    rows.append(sweep_row(coloring, trials, seed, config.workers,
                                          opts.get("density_samples"), opts.get("probability_trials")))
    return Outcome(rows)


COMMANDS = {
    "build": cmd_build,
    "color": cmd_color,
    "verify": cmd_verify,
    "search-red": cmd_search_red,
    "search-blue": cmd_search_blue,
    "exact-1d": cmd_exact_1d,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
}


def execute(config: RunConfig) -> Outcome:
    if config.subcommand not in COMMANDS:
        raise PreconditionError(f"unknown subcommand {config.subcommand!r}")
    if config.format not in FORMATS:
        raise PreconditionError(f"unknown format {config.format!r}")
    logger.info("running %s seed=%d", config.subcommand, config.seed)
    return COMMANDS[config.subcommand](config.options, config)


# Parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app", description="Periodic red/blue colorings of E^n")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=FORMATS, default="text")
    parser.add_argument("--workers", type=int, default=None, help="threads for Monte Carlo loops")
    parser.add_argument("--save-config", default=None, help="write the RunConfig of this invocation as JSON")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    build = sub.add_parser("build", help="construct, certify, color and save")
    build.add_argument("--n", type=int, required=True)
    build.add_argument("--R", type=float, required=True)
    build.add_argument("--t", type=float, default=None)
    build.add_argument("--x", type=float, default=None)
    build.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.RANDOM_DARTS.value)
    build.add_argument("--allow-small-R", action="store_true")
    build.add_argument("--max-darts", type=int, default=None)
    build.add_argument("--out", required=True)

    color = sub.add_parser("color", help="color of one point of E^n")
    color.add_argument("coloring")
    color.add_argument("--at", required=True, help="x1,...,xn")

    verify = sub.add_parser("verify", help="run every certificate on a coloring file")
    verify.add_argument("coloring")

    red = sub.add_parser("search-red", help="look for red points at distance 1")
    red.add_argument("coloring")
    red.add_argument("--trials", type=int, default=None)
    red.add_argument("--timing", action="store_true")

    blue = sub.add_parser("search-blue", help="look for a blue l_m or a blue copy of K")
    blue.add_argument("coloring")
    blue.add_argument("--m", type=int, default=2)
    blue.add_argument("--k", default=None, help="K as 'x1,..,xn;y1,..,yn;...'")
    blue.add_argument("--trials", type=int, default=None)
    blue.add_argument("--timing", action="store_true")

    exact = sub.add_parser("exact-1d", help="exact longest blue l_m in dimension 1")
    exact.add_argument("coloring")
    exact.add_argument("--m-max", type=int, default=None)
    exact.add_argument("--trials", type=int, default=None, help="also run the Monte Carlo search")

    bnd = sub.add_parser("bounds", help="evaluate the union-bound arithmetic")
    bnd.add_argument("--n", type=int, default=None)
    bnd.add_argument("--R", type=float, default=None)
    bnd.add_argument("--K", type=int, default=None)
    bnd.add_argument("--d", type=int, default=None)
    bnd.add_argument("--min-k", action="store_true")
    bnd.add_argument("--ell-m", type=int, default=None)
    bnd.add_argument("--count-bound", action="store_true")
    bnd.add_argument("--sign-pattern", type=float, nargs=3, metavar=("M", "N", "D"), default=None)

    sweep = sub.add_parser("sweep", help="grid of parameters, one CSV row per cell")
    sweep.add_argument("--mode", choices=("colorings", "bounds"), default="colorings")
    sweep.add_argument("--n", type=_ints, required=True)
    sweep.add_argument("--R", type=_floats, required=True)
    sweep.add_argument("--x", type=_floats, default=None)
    sweep.add_argument("--t", type=float, default=None)
    sweep.add_argument("--seeds", type=_ints, default=None)
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--density-samples", type=int, default=None)
    sweep.add_argument("--probability-trials", type=int, default=None)
    sweep.add_argument("--max-darts", type=int, default=None)
    sweep.add_argument("--out", default=None, help="CSV path (default stdout)")

    run = sub.add_parser("run", help="replay a saved RunConfig")
    run.add_argument("--config", required=True)
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    if args.subcommand == "run":
        try:
            return RunConfig.model_validate_json(Path(args.config).read_text())
        except OSError as exc:
            raise StorageError(f"cannot read {args.config}: {exc}") from exc
    options = {k: v for k, v in vars(args).items() if k not in GLOBAL_KEYS}
    return RunConfig(subcommand=args.subcommand, seed=args.seed, format=args.format,
                     workers=args.workers, options=options)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = to_run_config(args)
        if args.save_config:
            Path(args.save_config).write_text(config.model_dump_json(indent=2) + "\n")
        outcome = execute(config)
        output = render(outcome, "csv" if config.subcommand == "sweep" and config.format == "text"
                        else config.format)
        out_path = config.options.get("out") if config.subcommand == "sweep" else None
        if out_path:
            Path(out_path).write_text(output)
        else:
            sys.stdout.write(output)
        return outcome.status
    except (StorageError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except CertificationError as exc:
        logger.error("%s", exc)
        return EXIT_FAILED
    except (RamseyError, ValidationError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
