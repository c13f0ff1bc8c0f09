"""Command line interface: analyze, simulate, mc and compare."""

import argparse
import contextlib
import json
import logging
import sys
from typing import IO, Any, Callable, Dict, Iterator, List, Optional, Sequence

import pandas as pd
from rich.console import Console
from rich.table import Table
from typing_extensions import NoReturn

from .config import AnalysisConfig
from .data.io import parse_trial_csv, write_trial_csv
from .estimators.base import MethodId
from .estimators.factory import resolve_methods
from .estimators.report import analyze_all
from .exceptions import ConfigError, PrepostError, UsageError
from .logging import configure_logging
from .resampling.bootstrap import MIN_REPLICATES
from .simulation.montecarlo import MIN_REPLICATIONS, MCConfig, run_mc
from .simulation.scenarios import PRESET_NAMES, ScenarioConfig, generate_trial, preset
from .theory.params import DesignSize
from .theory.variance import crossover_correlation, efficiency_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

FORMATS = ("json", "csv", "table")


class _ArgumentParser(argparse.ArgumentParser):
    """Parser that raises UsageError instead of exiting."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def build_parser(config: AnalysisConfig) -> argparse.ArgumentParser:
    """Build the argument parser with defaults taken from ``config``."""
    parser = _ArgumentParser(
        prog="prepost",
        description="Treatment-effect analysis of two-arm pre-post trials.",
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=config.log_level,
        help="diagnostics level on stderr (default: %(default)s)",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    output = _ArgumentParser(add_help=False)
    output.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    output.add_argument("--format", choices=FORMATS, default="json")

    scenario = _ArgumentParser(add_help=False)
    scenario.add_argument(
        "--preset",
        default="homogeneous",
        help=f"scenario name: {', '.join(PRESET_NAMES)} (default: %(default)s)",
    )
    scenario.add_argument("--n0", type=int, help="control arm size override")
    scenario.add_argument("--n1", type=int, help="treatment arm size override")

    estimation = _ArgumentParser(add_help=False)
    estimation.add_argument(
        "--methods",
        default="all",
        help="comma-separated method names or 'all' (default: all)",
    )
    estimation.add_argument(
        "--hc",
        type=str.lower,
        choices=["hc0", "hc1", "hc2", "hc3"],
        default=config.hc_kind.lower(),
        help="sandwich estimator flavor (default: %(default)s)",
    )
    estimation.add_argument(
        "--workers",
        type=int,
        default=config.workers,
        help="replication threads (default: %(default)s)",
    )

    analyze = commands.add_parser(
        "analyze",
        parents=[output, estimation],
        help="estimate the treatment effect with every method",
    )
    analyze.add_argument("--input", required=True, metavar="PATH")
    analyze.add_argument("--bootstrap", type=int, metavar="B")
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument(
        "--mode",
        choices=["homogeneous", "heterogeneous"],
        help="method family for 'all' and the ANCOVA inference SE",
    )
    analyze.add_argument("--residuals", metavar="PATH")
    analyze.set_defaults(handler=_cmd_analyze)

    simulate = commands.add_parser(
        "simulate", parents=[scenario], help="write one simulated trial as CSV"
    )
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    simulate.set_defaults(handler=_cmd_simulate)

    mc = commands.add_parser(
        "mc",
        parents=[output, scenario, estimation],
        help="Monte Carlo evaluation of the methods",
    )
    mc.add_argument("--reps", type=int, default=1000, metavar="R")
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--alpha", type=float, default=config.alpha)
    mc.set_defaults(handler=_cmd_mc)

    compare = commands.add_parser(
        "compare",
        parents=[output, scenario],
        help="oracle variances and efficiency gaps for a scenario",
    )
    compare.add_argument("--methods", default="all")
    compare.set_defaults(handler=_cmd_compare)
    return parser


@contextlib.contextmanager
def _open_output(path: Optional[str]) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        yield stream


def _write_table(table: Table, stream: IO[str]) -> None:
    Console(file=stream, width=160, color_system=None).print(table)


def _check_non_negative(name: str, value: int) -> None:
    if value < 0:
        raise UsageError(f"--{name} must be non-negative, got {value}")


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    try:
        cfg = preset(args.preset)
    except ValueError as e:
        raise UsageError(str(e)) from e
    if (args.n0 is None) != (args.n1 is None):
        raise UsageError("--n0 and --n1 must be given together")
    if args.n0 is not None:
        if args.n0 < 2 or args.n1 < 2:
            raise UsageError("--n0 and --n1 must be at least 2")
        cfg = cfg.model_copy(update={"design": DesignSize(n0=args.n0, n1=args.n1)})
    return cfg


def _cmd_analyze(args: argparse.Namespace, config: AnalysisConfig) -> int:
    methods = resolve_methods(args.methods, args.mode)
    if args.bootstrap is not None and args.bootstrap < MIN_REPLICATES:
        raise UsageError(f"--bootstrap must be at least {MIN_REPLICATES}")
    _check_non_negative("seed", args.seed)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")

    ds = parse_trial_csv(args.input)
    report = analyze_all(
        ds,
        hc_kind=args.hc.upper(),
        bootstrap=args.bootstrap,
        seed=args.seed,
        methods=[m.value for m in methods],
        mode=args.mode,
        workers=args.workers,
        reml_tol=config.reml_tol,
        reml_max_iter=config.reml_max_iter,
    )
    with _open_output(args.out) as stream:
        if args.format == "json":
            stream.write(report.to_json() + "\n")
        elif args.format == "csv":
            report.to_csv(stream)
        else:
            _write_table(report.to_table(), stream)
    if args.residuals is not None:
        with open(args.residuals, "w", encoding="utf-8") as stream:
            stream.write(report.residuals_json() + "\n")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace, config: AnalysisConfig) -> int:
    cfg = _scenario(args)
    _check_non_negative("seed", args.seed)
    ds = generate_trial(cfg, args.seed)
    with _open_output(args.out) as stream:
        write_trial_csv(ds, stream)
    logger.info(f"Simulated {cfg.label} trial with n0={ds.n0}, n1={ds.n1}")
    return EXIT_OK


def _cmd_mc(args: argparse.Namespace, config: AnalysisConfig) -> int:
    cfg = _scenario(args)
    methods = resolve_methods(args.methods, cfg.params.mode)
    if args.reps < MIN_REPLICATIONS:
        raise UsageError(f"--reps must be at least {MIN_REPLICATIONS}")
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie in (0, 1)")
    _check_non_negative("seed", args.seed)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")

    report = run_mc(
        MCConfig(
            scenario=cfg,
            methods=methods,
            replications=args.reps,
            seed=args.seed,
            alpha=args.alpha,
            hc_kind=args.hc.upper(),
            workers=args.workers,
        )
    )
    with _open_output(args.out) as stream:
        if args.format == "json":
            stream.write(report.to_json() + "\n")
        elif args.format == "csv":
            report.to_csv(stream)
        else:
            _write_table(report.to_table(), stream)
    return EXIT_OK


def _compare_document(cfg: ScenarioConfig, methods: List[MethodId]) -> Dict[str, Any]:
    params = cfg.params
    crossover = (
        crossover_correlation(params) if params.mode == "homogeneous" else None
    )
    return {
        "scenario": cfg.label,
        "mode": params.mode,
        "true_tau": params.tau,
        "n0": cfg.design.n0,
        "n1": cfg.design.n1,
        "crossover_correlation": crossover,
        "rows": efficiency_table(params, cfg.design, methods),
    }


def _compare_table(document: Dict[str, Any]) -> Table:
    table = Table(
        title=(
            f"Oracle variances: {document['scenario']} "
            f"(n0={document['n0']}, n1={document['n1']})"
        )
    )
    for header in ("Method", "Variance", "SE", "Gap to best", "Note"):
        justify = "left" if header in ("Method", "Note") else "right"
        table.add_column(header, justify=justify)

    def fmt(value: Optional[float]) -> str:
        return "-" if value is None else f"{value:.5f}"

    for row in document["rows"]:
        table.add_row(
            MethodId.parse(row["method"]).label,
            fmt(row["variance"]),
            fmt(row["se"]),
            fmt(row["gap_to_best"]),
            row["note"] or "",
        )
    return table


def _cmd_compare(args: argparse.Namespace, config: AnalysisConfig) -> int:
    cfg = _scenario(args)
    methods = resolve_methods(args.methods, cfg.params.mode)
    document = _compare_document(cfg, methods)
    with _open_output(args.out) as stream:
        if args.format == "json":
            stream.write(json.dumps(document, indent=2, allow_nan=False) + "\n")
        elif args.format == "csv":
            frame = pd.DataFrame.from_records(
                document["rows"],
                columns=["method", "variance", "se", "gap_to_best", "note"],
            )
            frame.to_csv(stream, index=False, lineterminator="\n")
        else:
            _write_table(_compare_table(document), stream)
    return EXIT_OK


Handler = Callable[[argparse.Namespace, AnalysisConfig], int]


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit status.

    Args:
        argv: Arguments without the program name, defaults to sys.argv[1:]

    Returns:
        int: 0 on success, 1 on a usage error, 2 on a data or file error
    """
    try:
        config = AnalysisConfig.from_env()
        args = build_parser(config).parse_args(argv)
    except (UsageError, ConfigError) as e:
        print(f"prepost: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    configure_logging(args.log_level)
    handler: Handler = args.handler
    try:
        return handler(args, config)
    except UsageError as e:
        print(f"prepost: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PrepostError, OSError, ValueError) as e:
        print(f"prepost: error: {e}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    """Console script entry point."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
