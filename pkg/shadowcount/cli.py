"""
Command-line entry point.

    shadowcount --input graph.txt --command count --pattern k1 --k 5

Reports go to standard output, logs to standard error. Exit codes: 0 on
success (low-confidence estimates included), 1 on usage or configuration
errors, 2 when the input cannot be read or parsed.
"""
import sys
import argparse
import logging
from typing import List, NoReturn, Optional, TextIO

from .config import Command, OutputFormat, RunConfig
from .estimators import Mode, PatternKind, PatternSpec, estimate, list_near_cliques, phi_table
from .exact_oracle import exact_counts
from .exceptions import ConfigError, GraphFormatError
from .graph_core import degeneracy_order, load_edge_list
from .monitoring import resource_snapshot, setup_monitoring
from .report import CountReport, ExactReport, GraphSummary, StatsReport, emit_instances, emit_report
from .utils import VALID_LOG_LEVELS, generate_seed, tracing_enabled, validate_environment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Raise on usage errors instead of exiting with argparse's own status."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="shadowcount",
        description="Estimate k-clique and near-clique counts with Turán-shadow sampling.",
    )
    parser.add_argument("--input", required=True, help="Edge-list file (SNAP format)")
    parser.add_argument("--command", required=True, choices=[c.value for c in Command])
    parser.add_argument("--pattern", required=True, choices=[p.value for p in PatternKind])
    parser.add_argument("--k", required=True, type=int, help="Pattern size")
    parser.add_argument("--samples", type=int, help="Sample budget (default 500000)")
    parser.add_argument("--seed", type=int, help="Random seed (default: derived from the clock)")
    parser.add_argument("--mode", choices=[m.value for m in Mode])
    parser.add_argument("--output", choices=[o.value for o in OutputFormat])
    parser.add_argument("--threads", type=int, help="Sampling batches run concurrently")
    parser.add_argument("--list-limit", type=int, help="Maximum instances written by list")
    parser.add_argument("--with-exact", action="store_true", help="Compute exact counts for stats ratios")
    parser.add_argument("--log-level", choices=list(VALID_LOG_LEVELS))
    parser.add_argument("--tracing", action="store_true", help="Record OpenTelemetry spans")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        input_path=args.input,
        command=args.command,
        pattern=args.pattern,
        k=args.k,
        samples=args.samples,
        seed=args.seed,
        mode=args.mode,
        output=args.output,
        threads=args.threads,
        list_limit=args.list_limit,
        log_level=args.log_level,
        tracing=args.tracing or tracing_enabled(),
        with_exact=args.with_exact,
    )


def run(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """Execute one configured run and write its report; returns the exit code."""
    out = out if out is not None else sys.stdout
    try:
        g, labels = load_edge_list(config.input_path)
        d = degeneracy_order(g)
        pattern = PatternSpec.for_graph(config.pattern, config.k, g, d)
        summary = GraphSummary(
            graph=config.input_path.name,
            n=g.n,
            m=g.m,
            degeneracy=d.degeneracy,
            d_max=g.d_max,
        )
        logger.info(
            f"{config.command.value} {pattern.kind.value} k={pattern.k} h={pattern.h} "
            f"on {summary.graph}: degeneracy {d.degeneracy}, bound B={pattern.bound:.6g}"
        )

        if config.command is Command.COUNT:
            seed = config.seed if config.seed is not None else generate_seed()
            result = estimate(g, pattern, config.samples, seed,
                              mode=config.mode, degeneracy=d, batches=config.threads)
            logger.info(
                f"Success ratio {result.success_ratio:.4f}, shadow leaves built "
                f"{result.shadow_leaves_built}, peak live {result.peak_live_leaves}"
            )
            text = emit_report(CountReport.from_estimate(summary, result), config.output)

        elif config.command is Command.EXACT:
            counts = exact_counts(g, pattern.k)
            text = emit_report(ExactReport.from_counts(summary, pattern.kind.value, pattern.h, counts),
                               config.output)

        elif config.command is Command.LIST:
            seed = config.seed if config.seed is not None else generate_seed()
            instances = list_near_cliques(g, pattern, config.samples, seed, mode=config.mode,
                                          limit=config.list_limit, degeneracy=d)
            original = {dense: label for label, dense in labels.items()}
            text = emit_instances(instances, original, config.output)

        else:
            report = StatsReport(
                **summary.model_dump(),
                command="stats",
                pattern=pattern.kind.value,
                k=pattern.k,
                h=pattern.h,
                phi=phi_table(g, d, pattern.h).total,
            )
            if config.with_exact:
                report = report.with_counts(exact_counts(g, pattern.k))
            text = emit_report(report, config.output)

    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (GraphFormatError, OSError) as e:
        logger.error(f"Cannot read input {config.input_path}: {e}")
        return EXIT_IO

    out.write(text)
    out.flush()
    snapshot = resource_snapshot()
    if "rss_mb" in snapshot:
        logger.info(f"Resident memory at exit: {snapshot['rss_mb']:.1f} MB")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    try:
        validate_environment()
        config = parse_config(argv)
    except (ConfigError, ValueError) as e:
        setup_monitoring("ERROR")
        logger.error(str(e))
        return EXIT_CONFIG

    setup_monitoring(config.log_level, enable_tracing=config.tracing)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
