"""Render metric reports and error breakdowns as TSV, aligned tables and JSON."""

from __future__ import annotations

from collections.abc import Sequence

from src.core.eval_port import (
    CUTOFFS,
    ERROR_CATEGORIES,
    METRICS,
    ErrorBreakdown,
    MetricsReport,
)

_METRIC_COLUMNS = [(metric, cutoff) for metric in METRICS for cutoff in CUTOFFS]


def metric_header() -> list[str]:
    return ["retriever", *(f"{metric}@{cutoff}" for metric, cutoff in _METRIC_COLUMNS)]


def metric_rows(report: MetricsReport) -> list[list[str]]:
    return [
        [label, *(f"{report.value(label, metric, cutoff):.3f}" for metric, cutoff in _METRIC_COLUMNS)]
        for label in report.labels
    ]


def render_tsv(report: MetricsReport) -> str:
    lines = ["\t".join(metric_header())]
    lines.extend("\t".join(row) for row in metric_rows(report))
    return "\n".join(lines) + "\n"


def render_table(report: MetricsReport) -> str:
    """Retrievers as rows, metric@cutoff as columns, then the instance count."""
    table = format_table(metric_header(), metric_rows(report))
    footer = f"instances: {report.instance_count}"
    if report.failed_instances:
        failed = ", ".join(f"{label}={count}" for label, count in report.failures.items() if count)
        footer += f" (failed: {failed})"
    return f"{table}{footer}\n"


def error_header() -> list[str]:
    return ["retriever", *ERROR_CATEGORIES, "total"]


def error_rows(breakdowns: Sequence[ErrorBreakdown]) -> list[list[str]]:
    return [
        [
            breakdown.label,
            *(f"{breakdown.counts[category]} ({breakdown.rate(category):.1%})" for category in ERROR_CATEGORIES),
            str(breakdown.total),
        ]
        for breakdown in breakdowns
    ]


def render_error_table(breakdowns: Sequence[ErrorBreakdown]) -> str:
    return format_table(error_header(), error_rows(breakdowns))


def render_error_tsv(breakdowns: Sequence[ErrorBreakdown]) -> str:
    lines = ["\t".join(error_header())]
    for breakdown in breakdowns:
        counts = [str(breakdown.counts[category]) for category in ERROR_CATEGORIES]
        lines.append("\t".join([breakdown.label, *counts, str(breakdown.total)]))
    return "\n".join(lines) + "\n"


def format_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left-align the first column, right-align the rest."""
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]

    def line(cells: Sequence[str]) -> str:
        first = cells[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(cells[1:], widths[1:], strict=True)]
        return "  ".join([first, *rest]).rstrip()

    rule = "  ".join("-" * width for width in widths)
    return "\n".join([line(header), rule, *(line(row) for row in rows)]) + "\n"


def report_to_json(report: MetricsReport, breakdowns: Sequence[ErrorBreakdown] = ()) -> dict[str, object]:
    return {
        "instance_count": report.instance_count,
        "failures": dict(report.failures),
        "metrics": {
            label: {
                f"{metric}@{cutoff}": report.value(label, metric, cutoff) for metric, cutoff in _METRIC_COLUMNS
            }
            for label in report.labels
        },
        "errors": {
            breakdown.label: {category: breakdown.counts[category] for category in ERROR_CATEGORIES}
            for breakdown in breakdowns
        },
    }
