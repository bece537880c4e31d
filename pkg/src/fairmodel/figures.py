"""Matplotlib figures for the report path.

Each report kind has a small summary chart; `report ... --figure out.png`
writes it next to the textual output. Rendering uses the Agg backend so it
works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analysis import (
    AttributionReport,
    CoverageReport,
    ObstacleStatus,
    Suggestion,
)
from .catalogue import STAGES

_STATE_ORDER = ("resolved", "accepted", "open")
_STATE_COLORS = {"resolved": "#4c9f70", "accepted": "#e0a82e", "open": "#c23b22"}


def _bar_figure(title: str, labels: list[str], values: list[float],
                colors: list[str] | None = None, ylabel: str = "count"):
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(labels)), 3.2))
    ax.bar(range(len(labels)), values, color=colors or "#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    return fig


def obstacle_figure(statuses: list[ObstacleStatus], title: str):
    counts = {state: 0 for state in _STATE_ORDER}
    for status in statuses:
        counts[status.state] += 1
    return _bar_figure(f"Obstacle status - {title}", list(_STATE_ORDER),
                       [counts[s] for s in _STATE_ORDER],
                       [_STATE_COLORS[s] for s in _STATE_ORDER], "obstacles")


def attribution_figure(report: AttributionReport, title: str):
    labels = ["system", "environment", "unspecified"]
    values = [len(report.system), len(report.environment), len(report.unspecified)]
    fig = _bar_figure(f"IS attribution - {title}", labels, values,
                      ["#d3d3d3", "#4878a8", "#b0b0b0"], "elements")
    if report.system_share is not None:
        fig.axes[0].set_xlabel(f"system share: {report.system_share} "
                               f"({float(report.system_share):.0%})")
        fig.tight_layout()
    return fig


def coverage_figure(report: CoverageReport, title: str):
    values = [len(report.per_stage[stage]) for stage in STAGES]
    colors = ["#4c9f70" if report.per_stage[stage] else "#c9c9c9" for stage in STAGES]
    fig = _bar_figure(f"Stage coverage {report.fraction} - {title}",
                      list(STAGES), values, colors, "patterns")
    return fig


def balance_figure(counts: dict[str, int], title: str):
    labels = sorted(counts)
    return _bar_figure(f"Dimension balance - {title}", labels,
                       [counts[k] for k in labels], None, "values")


def suggestion_figure(suggestions: list[Suggestion], title: str):
    per_pattern: dict[str, int] = {}
    for suggestion in suggestions:
        per_pattern[suggestion.pattern] = per_pattern.get(suggestion.pattern, 0) + 1
    labels = sorted(per_pattern) or ["(none)"]
    values = [per_pattern.get(k, 0) for k in labels]
    return _bar_figure(f"Suggested patterns - {title}", labels, values,
                       None, "suggestions")


def save_figure(fig, path: str) -> None:
    fig.savefig(path, dpi=120)
    plt.close(fig)


__all__ = [
    "obstacle_figure",
    "attribution_figure",
    "coverage_figure",
    "balance_figure",
    "suggestion_figure",
    "save_figure",
]
