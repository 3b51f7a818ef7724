"""
Report generation utilities for different output formats.
"""

import json
from typing import Dict, List

import pandas as pd

from .models import AnalysisSummary, CorrelatorSet, DistanceSummary

try:
    from colorama import Fore, Style, init as colorama_init
    colorama_init(autoreset=True)
    _HAS_COLORAMA = True
except ImportError:
    _HAS_COLORAMA = False
    # Fallback: no colors
    class Fore:  # type: ignore[no-redef]
        RED = GREEN = YELLOW = BLUE = CYAN = MAGENTA = WHITE = RESET = ""

    class Style:  # type: ignore[no-redef]
        BRIGHT = DIM = RESET_ALL = ""


def _fmt(value, digits: int = 3) -> str:
    return "-" if value is None else f"{value:.{digits}e}"


class ReportGenerator:
    """Generate reports in various formats."""

    @staticmethod
    def distance_table(summary: DistanceSummary) -> pd.DataFrame:
        """One row per distance bin, ready for plotting."""
        return pd.DataFrame(
            [b.to_dict() for b in summary.bins],
            columns=["distance", "count", "min", "q1", "median", "q3", "max", "mean"],
        )

    @staticmethod
    def generate_distance_csv(summary: DistanceSummary) -> str:
        """CSV with one row per distance bin; empty bins have blank statistics."""
        return ReportGenerator.distance_table(summary).to_csv(index=False)

    @staticmethod
    def generate_histogram_csv(summary: AnalysisSummary) -> str:
        """CSV with one row per histogram bin of every quantity."""
        rows: List[Dict] = []
        for kind, histograms in (("abs", summary.histograms), ("signed", summary.signed_histograms)):
            for quantity, hist in histograms.items():
                for k, count in enumerate(hist.counts):
                    rows.append({
                        "quantity": quantity,
                        "values": kind,
                        "low": hist.edges[k],
                        "high": hist.edges[k + 1],
                        "count": count,
                        "underflow": hist.underflow,
                        "overflow": hist.overflow,
                    })
        return pd.DataFrame(rows).to_csv(index=False)

    @staticmethod
    def generate_json_report(summary: AnalysisSummary) -> str:
        """
        Generate a JSON report.

        Args:
            summary: Analysis summary to report on.

        Returns:
            JSON string.
        """
        return json.dumps(summary.to_dict(), indent=2, allow_nan=False) + "\n"

    @staticmethod
    def generate_text_report(
        summary: AnalysisSummary,
        corr: CorrelatorSet,
        colored: bool = True,
    ) -> str:
        """
        Generate a human-readable text report.

        Args:
            summary: Analysis summary to report on.
            corr: The correlators the summary was computed from.
            colored: Whether to use terminal colors (requires colorama).

        Returns:
            Formatted text report.
        """
        if not colored or not _HAS_COLORAMA:
            fore_red = fore_green = fore_cyan = style_bright = style_reset = ""
        else:
            fore_red = Fore.RED
            fore_green = Fore.GREEN
            fore_cyan = Fore.CYAN
            style_bright = Style.BRIGHT
            style_reset = Style.RESET_ALL

        lines = []

        lines.append(f"\n{style_bright}{'=' * 60}")
        lines.append("READOUT ERROR CORRELATION REPORT")
        lines.append(f"{'=' * 60}{style_reset}\n")

        stats = summary.correlation_summary
        lines.append(f"Qubits: {summary.num_qubits}")
        if corr.exact:
            lines.append("Source: exact (infinite-shot) correlators")
        else:
            lines.append(f"Shots per preparation: {corr.shots}")
        lines.append(f"Mean epsilon: {_fmt(stats['mean_epsilon'])}")
        lines.append(f"Max |A|: {_fmt(stats['max_abs_A'])}   Max |C|: {_fmt(stats['max_abs_C'])}\n")

        if summary.floor_flags is not None:
            floors = summary.floor_flags
            lines.append(f"{style_bright}NOISE FLOOR (k = {floors.multiplier:g}):{style_reset}")
            lines.append("-" * 60)
            for name, floor in (("A", floors.A_floor), ("C", floors.C_floor)):
                above = floors.count_above(name)
                color = fore_red if above else fore_green
                lines.append(
                    f"{name}: floor {_fmt(floor)}, "
                    f"{color}{above} entr{'y' if above == 1 else 'ies'} above{style_reset}"
                )
            lines.append("")

        lines.append(f"{style_bright}|A_ij| BY MINIMUM CONNECTED DISTANCE:{style_reset}")
        lines.append("-" * 60)
        lines.append(f"{'d':>3} {'pairs':>6} {'min':>10} {'q1':>10} {'median':>10} {'q3':>10} {'max':>10}")
        for b in summary.distance_summary.bins:
            lines.append(
                f"{b.distance:>3} {b.count:>6} {_fmt(b.minimum):>10} {_fmt(b.q1):>10} "
                f"{fore_cyan}{_fmt(b.median):>10}{style_reset} {_fmt(b.q3):>10} {_fmt(b.maximum):>10}"
            )
        if summary.distance_summary.unreachable_pairs:
            lines.append(f"Unreachable pairs excluded: {summary.distance_summary.unreachable_pairs}")
        lines.append("")

        return "\n".join(lines)

    @staticmethod
    def generate_markdown_report(summary: AnalysisSummary, corr: CorrelatorSet) -> str:
        """
        Generate a Markdown report.

        Args:
            summary: Analysis summary to report on.
            corr: The correlators the summary was computed from.

        Returns:
            Markdown formatted string.
        """
        stats = summary.correlation_summary
        lines = []

        lines.append("# Readout Error Correlation Report\n")
        lines.append(f"**Qubits:** {summary.num_qubits}\n")
        lines.append(f"**Shots:** {'exact' if corr.exact else corr.shots}\n")
        lines.append(f"**Mean epsilon:** {_fmt(stats['mean_epsilon'])}\n")

        if summary.floor_flags is not None:
            floors = summary.floor_flags
            lines.append("## Noise Floor\n")
            lines.append("| Quantity | Floor | Above floor |")
            lines.append("|----------|-------|-------------|")
            lines.append(f"| A | {_fmt(floors.A_floor)} | {floors.count_above('A')} |")
            lines.append(f"| C | {_fmt(floors.C_floor)} | {floors.count_above('C')} |")
            lines.append("")

        lines.append("## |A_ij| by Distance\n")
        lines.append("| Distance | Pairs | Min | Q1 | Median | Q3 | Max |")
        lines.append("|----------|-------|-----|----|--------|----|-----|")
        for b in summary.distance_summary.bins:
            lines.append(
                f"| {b.distance} | {b.count} | {_fmt(b.minimum)} | {_fmt(b.q1)} | "
                f"{_fmt(b.median)} | {_fmt(b.q3)} | {_fmt(b.maximum)} |"
            )
        lines.append("")

        return "\n".join(lines)
