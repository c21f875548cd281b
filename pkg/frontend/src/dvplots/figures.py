"""Render experiment figures from dvbandit results CSV files.

This package is deliberately coupled to nothing but the published CSV
schema: one row per (parameter point, policy) with mean/standard-error
columns for the sample count, stopping time, and total cost.  A figure is a
row of panels (one per requested statistic) with the swept parameter on the
x axis, one line per policy, and a +-2 standard-error band around each line.
Rendering is deterministic: the same CSV yields byte-identical image files.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

PANEL_STATS = ("eta", "tau", "cost")
PANEL_LABELS = {
    "eta": "mean samples",
    "tau": "mean stopping time",
    "cost": "mean total cost",
}
POLICY_ORDER = ("wtcs", "pswse", "se", "lucb")
POLICY_STYLE = {
    "wtcs": ("WTCS", "#1f77b4", "o"),
    "pswse": ("PS-WSE", "#d62728", "s"),
    "se": ("SE", "#2ca02c", "^"),
    "lucb": ("LUCB", "#9467bd", "v"),
}
LOG_X_EXPERIMENTS = ("exp4",)

_BASE_COLUMNS = ("experiment", "param_name", "param_value", "policy")


class SchemaError(ValueError):
    """The CSV does not carry the columns the requested panels need."""


@dataclass(frozen=True)
class FigureSpec:
    """What to render: which experiment of which CSV, into which file."""

    csv_path: str
    experiment: str
    out_path: str
    panels: tuple[str, ...] = PANEL_STATS
    log_x: Optional[bool] = None  # None: log scale iff the experiment wants it

    def __post_init__(self):
        if not self.panels:
            raise ValueError("panels must not be empty")
        bad = [p for p in self.panels if p not in PANEL_STATS]
        if bad:
            raise ValueError(
                f"unknown panels {bad}; expected a subset of {PANEL_STATS}")

    @property
    def use_log_x(self) -> bool:
        if self.log_x is not None:
            return self.log_x
        return self.experiment in LOG_X_EXPERIMENTS


def required_columns(panels=PANEL_STATS) -> tuple[str, ...]:
    cols = list(_BASE_COLUMNS)
    for panel in panels:
        cols.append(f"mean_{panel}")
        cols.append(f"se_{panel}")
    return tuple(cols)


def load_rows(csv_path: str, experiment: str, panels=PANEL_STATS) -> list[dict]:
    """Rows of one experiment, schema-checked and with numeric fields parsed."""
    with open(csv_path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for column in required_columns(panels):
            if column not in header:
                raise SchemaError(
                    f"results file {csv_path} is missing column '{column}'")
        rows = []
        for rec in reader:
            if rec["experiment"] != experiment:
                continue
            row = {
                "param_name": rec["param_name"],
                "param_value": float(rec["param_value"]),
                "policy": rec["policy"],
            }
            for panel in panels:
                row[f"mean_{panel}"] = float(rec[f"mean_{panel}"])
                row[f"se_{panel}"] = float(rec[f"se_{panel}"])
            rows.append(row)
    if not rows:
        raise ValueError(f"no rows for experiment '{experiment}' in {csv_path}")
    return rows


def _series(rows: list[dict], policy: str) -> list[dict]:
    mine = [r for r in rows if r["policy"] == policy]
    return sorted(mine, key=lambda r: r["param_value"])


def build_figure(rows: list[dict], spec: FigureSpec):
    """Assemble the matplotlib Figure (separated from saving for testability)."""
    param_name = rows[0]["param_name"]
    policies = [p for p in POLICY_ORDER if any(r["policy"] == p for r in rows)]
    policies += sorted({r["policy"] for r in rows} - set(POLICY_ORDER))
    n_panels = len(spec.panels)
    fig, axes = plt.subplots(1, n_panels, figsize=(4.2 * n_panels, 3.6),
                             squeeze=False)
    for ax, panel in zip(axes[0], spec.panels):
        for policy in policies:
            series = _series(rows, policy)
            xs = [r["param_value"] for r in series]
            ys = [r[f"mean_{panel}"] for r in series]
            band = [2.0 * r[f"se_{panel}"] for r in series]
            label, color, marker = POLICY_STYLE.get(
                policy, (policy.upper(), "#7f7f7f", "x"))
            ax.plot(xs, ys, label=label, color=color, marker=marker,
                    markersize=4, linewidth=1.5)
            ax.fill_between(xs, [y - b for y, b in zip(ys, band)],
                            [y + b for y, b in zip(ys, band)],
                            color=color, alpha=0.15, linewidth=0)
        if spec.use_log_x:
            ax.set_xscale("log")
        ax.set_xlabel(param_name)
        ax.set_ylabel(PANEL_LABELS[panel])
        ax.grid(True, alpha=0.3)
    axes[0][0].legend(fontsize=9)
    fig.suptitle(spec.experiment)
    fig.tight_layout()
    return fig


def render_experiment_figures(spec: FigureSpec) -> list[str]:
    """Render the figure described by ``spec``; returns the files written."""
    rows = load_rows(spec.csv_path, spec.experiment, spec.panels)
    fig = build_figure(rows, spec)
    try:
        fig.savefig(spec.out_path, dpi=150)
    finally:
        plt.close(fig)
    return [spec.out_path]
