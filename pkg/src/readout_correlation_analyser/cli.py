"""
Command-line interface for the readout correlation analyser.

Subcommands exchange files only, so hardware counts can replace the
simulate stage without changing any other flag.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from readout_correlation_analyser import __version__
from readout_correlation_analyser.analysis import (
    bin_by_distance,
    correlation_summary,
    default_edges,
    histogram,
    matrix_report,
    noise_floor_classification,
    signed_edges,
)
from readout_correlation_analyser.errors import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    ReadoutAnalysisError,
    ValidationError,
)
from readout_correlation_analyser.estimators import characterize
from readout_correlation_analyser.loaders import (
    ConfigLoader,
    config_value,
    dumps,
    load_correlators,
    load_noise_model,
    load_topology,
    write_correlators,
    write_counts,
    write_text_atomic,
)
from readout_correlation_analyser.models import AnalysisSummary, CorrelatorSet, DistanceMatrix, Topology
from readout_correlation_analyser.noise_model import ReadoutSimulator, exact_correlators
from readout_correlation_analyser.protocol import ingest_counts, run_protocol
from readout_correlation_analyser.reporting import ReportGenerator
from readout_correlation_analyser.topology import builtin_topology, min_distances

PROG = "readout-analyser"
ERROR_PREFIX = f"{PROG}: error:"

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Resolved settings for one subcommand invocation."""
    subcommand: str
    inputs: List[Path] = field(default_factory=list)
    out: Optional[Path] = None
    shots: Optional[int] = None
    seed: Optional[int] = None
    bit_order: Optional[str] = None
    edges: Optional[List[float]] = None
    floor_multiplier: Optional[float] = None
    max_enum: Optional[int] = None
    workers: int = 1

    def check_paths(self) -> None:
        """Inputs must exist and outputs must have an existing parent directory."""
        for path in self.inputs:
            if not path.is_file():
                raise FileNotFoundError(f"input file not found: {path}")
        if self.out is not None and not self.out.resolve().parent.is_dir():
            raise FileNotFoundError(f"output directory does not exist: {self.out.parent}")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors are one line with exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        sys.stderr.write(f"{ERROR_PREFIX} {message}\n")
        self.exit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def parse_edges(text: str) -> List[float]:
    """
    Histogram edges from the command line.

    Accepts an explicit list '0,1e-3,1', 'log:LOW:HIGH:BINS' or
    'lin:LOW:HIGH:BINS'.
    """
    try:
        if text.startswith(("log:", "lin:")):
            kind, low, high, bins = text.split(":")
            if kind == "log":
                values = np.logspace(np.log10(float(low)), np.log10(float(high)), int(bins) + 1)
            else:
                values = np.linspace(float(low), float(high), int(bins) + 1)
            return [float(v) for v in values]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid edges specification '{text}'")


def _builtin_spec(spec: str) -> bool:
    kind, _, size = spec.partition(":")
    return kind in ("path", "ring", "grid", "none") and size.isdigit()


def resolve_topology(spec: str) -> Topology:
    """A topology file path, or 'path:N', 'ring:N', 'grid:N', 'none:N'."""
    if _builtin_spec(spec):
        kind, _, size = spec.partition(":")
        return builtin_topology(kind, int(size))
    return load_topology(spec)


def analyse_correlators(
    corr: CorrelatorSet,
    distances: DistanceMatrix,
    edges: Optional[Sequence[float]] = None,
    multiplier: Optional[float] = None,
    config: Optional[ConfigLoader] = None,
) -> AnalysisSummary:
    """
    Run every analysis stage on one CorrelatorSet.

    Args:
        corr: Estimated or exact correlators.
        distances: Minimum connected distances for the same device.
        edges: Histogram edges for absolute values (defaults from config).
        multiplier: Noise-floor significance multiplier k.
        config: Optional configuration loader.

    Returns:
        Complete AnalysisSummary. Floor flags are omitted for exact correlators.
    """
    if distances.num_qubits != corr.num_qubits:
        raise ValidationError(
            f"num_qubits mismatch: correlators have {corr.num_qubits}, "
            f"topology has {distances.num_qubits}"
        )
    edges = list(edges) if edges is not None else default_edges(config)
    absolute = bool(config_value(config, "analysis.histogram.absolute", True))
    num_bins = int(config_value(config, "analysis.histogram.num_bins", 20))

    quantities = {
        "epsilon": np.asarray(corr.epsilon, dtype=float),
        "A": corr.offdiagonal("A"),
        "C": corr.offdiagonal("C"),
    }
    histograms = {
        name: histogram(np.abs(values) if absolute else values, edges)
        for name, values in quantities.items()
    }
    signed = {
        name: histogram(values, signed_edges(values, num_bins))
        for name, values in quantities.items()
    }

    floors = None
    if corr.bounds is not None:
        floors = noise_floor_classification(corr, multiplier, config)

    return AnalysisSummary(
        num_qubits=corr.num_qubits,
        histograms=histograms,
        signed_histograms=signed,
        distance_summary=bin_by_distance(corr.A, distances),
        distance_summary_C=bin_by_distance(corr.C, distances),
        matrices=matrix_report(corr, distances),
        correlation_summary=correlation_summary(corr, floors),
        floor_flags=floors,
    )


def cmd_simulate(run: RunConfig, config: Optional[ConfigLoader] = None) -> None:
    """Simulate all n+1 preparations and write a counts file."""
    model = load_noise_model(run.inputs[0])
    shots = run.shots or int(config_value(config, "simulation.shots", 81920))
    simulator = ReadoutSimulator(model)
    logger.info("simulating %d preparations x %d shots (seed %d)", model.num_qubits + 1, shots, run.seed)
    table = run_protocol(simulator, model.num_qubits, shots, run.seed, workers=run.workers)
    if simulator.clamp_warnings:
        logger.warning("%d flip probabilities were clamped to [0, 1]", simulator.clamp_warnings)
    write_counts(table, run.out, run.bit_order or "msb")
    logger.info("counts written to %s", run.out)


def cmd_characterize(run: RunConfig, config: Optional[ConfigLoader] = None) -> None:
    """Estimate correlators from a counts file."""
    counts = ingest_counts(run.inputs[0], run.bit_order)
    corr = characterize(counts)
    write_correlators(corr, run.out)
    logger.info("correlators written to %s (global bound %.3g)", run.out, corr.bounds.global_bound)


def cmd_analyze(
    run: RunConfig,
    topology: Topology,
    config: Optional[ConfigLoader] = None,
    report: Optional[str] = None,
    colored: bool = True,
) -> None:
    """Write the summary JSON plus CSV tables next to it."""
    corr = load_correlators(run.inputs[0])
    if topology.num_qubits != corr.num_qubits:
        raise ValidationError(
            f"num_qubits mismatch: correlators have {corr.num_qubits}, "
            f"topology has {topology.num_qubits}"
        )
    summary = analyse_correlators(
        corr, min_distances(topology), run.edges, run.floor_multiplier, config
    )

    reporter = ReportGenerator()
    out = run.out
    write_text_atomic(out, reporter.generate_json_report(summary))
    stem = out.with_suffix("")
    write_text_atomic(f"{stem}_distance.csv", reporter.generate_distance_csv(summary.distance_summary))
    write_text_atomic(f"{stem}_distance_C.csv", reporter.generate_distance_csv(summary.distance_summary_C))
    write_text_atomic(f"{stem}_histograms.csv", reporter.generate_histogram_csv(summary))
    write_text_atomic(f"{stem}_A.csv", summary.matrices.to_csv("A"))
    write_text_atomic(f"{stem}_C.csv", summary.matrices.to_csv("C"))
    write_text_atomic(f"{stem}_distances.csv", summary.matrices.to_csv("distances"))
    logger.info("analysis written to %s", out)

    if report == "markdown":
        print(reporter.generate_markdown_report(summary, corr), file=sys.stderr)
    elif report == "text":
        print(reporter.generate_text_report(summary, corr, colored), file=sys.stderr)


def cmd_oracle(run: RunConfig, config: Optional[ConfigLoader] = None) -> None:
    """Write exact correlators of a noise model."""
    model = load_noise_model(run.inputs[0])
    max_enum = run.max_enum
    if max_enum is None:
        max_enum = int(config_value(config, "oracle.max_enumeration_log2", 24))
    corr = exact_correlators(model, max_enum)
    write_text_atomic(run.out, dumps(corr.to_dict()))
    logger.info("exact correlators written to %s", run.out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog=PROG,
        description="Characterize correlated readout errors from n+1 basis-state preparations.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s simulate --model model.json --shots 81920 --seed 7 --out counts.json
  %(prog)s characterize --counts counts.json --out corr.json
  %(prog)s analyze --correlators corr.json --topology device.json --out summary.json
  %(prog)s oracle --model model.json --out exact.json
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", "-c", type=str, help="Path to custom settings.yaml")
    parser.add_argument(
        "--verbose", "-v", action="count", default=0,
        help="Log progress to stderr (-vv for debug output)",
    )

    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    simulate = sub.add_parser("simulate", help="Sample counts for all n+1 preparations")
    simulate.add_argument("--model", required=True, help="Noise model JSON file")
    simulate.add_argument("--shots", type=_positive_int, help="Shots per preparation")
    simulate.add_argument("--seed", type=_non_negative_int, required=True, help="Random seed (required)")
    simulate.add_argument("--out", required=True, help="Counts file to write")
    simulate.add_argument("--bit-order", choices=["msb", "lsb"], help="Bit order of the written file (default: msb)")
    simulate.add_argument("--workers", type=_positive_int, default=None, help="Preparations sampled in parallel")

    char = sub.add_parser("characterize", help="Estimate epsilon, A and C from counts")
    char.add_argument("--counts", required=True, help="Counts JSON file")
    char.add_argument("--out", required=True, help="Correlator file to write")
    char.add_argument("--bit-order", choices=["msb", "lsb"], help="Bit order of the counts file if not declared")

    analyze = sub.add_parser("analyze", help="Histograms, distance bins, noise-floor flags")
    analyze.add_argument("--correlators", required=True, help="Correlator JSON file")
    analyze.add_argument("--topology", required=True, help="Topology JSON file, or path:N / ring:N / grid:N")
    analyze.add_argument("--out", required=True, help="Summary JSON file to write")
    analyze.add_argument("--edges", type=parse_edges, help="Histogram edges: '0,0.01,0.1' or 'log:1e-5:1:20'")
    analyze.add_argument("--floor-multiplier", type=float, help="Significance multiplier k (default: 1)")
    analyze.add_argument("--report", choices=["text", "markdown"], help="Also print a report to stderr")
    analyze.add_argument("--no-color", action="store_true", help="Disable colored text report")

    oracle = sub.add_parser("oracle", help="Exact correlators of a noise model")
    oracle.add_argument("--model", required=True, help="Noise model JSON file")
    oracle.add_argument("--out", required=True, help="Exact correlator file to write")
    oracle.add_argument("--max-enum", type=_positive_int, help="log2 of the enumeration guard (default: 24)")

    return parser


def _run_config(args: argparse.Namespace, config: Optional[ConfigLoader]) -> RunConfig:
    run = RunConfig(subcommand=args.subcommand, out=Path(args.out))
    if args.subcommand in ("simulate", "oracle"):
        run.inputs = [Path(args.model)]
    elif args.subcommand == "characterize":
        run.inputs = [Path(args.counts)]
    else:
        run.inputs = [Path(args.correlators)]
        if not _builtin_spec(args.topology):
            run.inputs.append(Path(args.topology))

    run.shots = getattr(args, "shots", None)
    run.seed = getattr(args, "seed", None)
    run.bit_order = getattr(args, "bit_order", None) or (
        config_value(config, "io.bit_order", None) if args.subcommand == "simulate" else None
    )
    run.edges = getattr(args, "edges", None)
    run.floor_multiplier = getattr(args, "floor_multiplier", None)
    run.max_enum = getattr(args, "max_enum", None)
    run.workers = getattr(args, "workers", None) or int(config_value(config, "simulation.workers", 1))
    return run


def _configure_logging(verbose: int, config: Optional[ConfigLoader]) -> None:
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    else:
        name = str(config_value(config, "logging.level", "WARNING")).upper()
        level = getattr(logging, name, logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.config and not Path(args.config).is_file():
        parser.error(f"config file not found: {args.config}")
    config = ConfigLoader(Path(args.config)) if args.config else ConfigLoader()

    try:
        _configure_logging(args.verbose, config)
        run = _run_config(args, config)
    except ReadoutAnalysisError as e:
        sys.stderr.write(f"{ERROR_PREFIX} {e}\n")
        return e.exit_code

    try:
        run.check_paths()
    except FileNotFoundError as e:
        parser.error(str(e))

    try:
        if run.subcommand == "simulate":
            cmd_simulate(run, config)
        elif run.subcommand == "characterize":
            cmd_characterize(run, config)
        elif run.subcommand == "analyze":
            cmd_analyze(run, resolve_topology(args.topology), config, args.report, not args.no_color)
        else:
            cmd_oracle(run, config)
    except ReadoutAnalysisError as e:
        sys.stderr.write(f"{ERROR_PREFIX} {e}\n")
        return e.exit_code
    except KeyboardInterrupt:
        sys.stderr.write(f"{ERROR_PREFIX} interrupted by user\n")
        return 130
    except (OSError, RuntimeError) as e:
        sys.stderr.write(f"{ERROR_PREFIX} {e}\n")
        return EXIT_RUNTIME

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
