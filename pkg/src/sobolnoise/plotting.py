"""Boxplot reports of replicated index estimates.

One SVG per study: main indices on top, totals below, a box per variable
for the raw and (when computed) corrected estimates, red reference dots
where the model's truth is known, and the noise variable's box appended
to the total panel. Artists carry gid attributes so the emitted SVG can
be inspected structurally.
"""

from __future__ import annotations

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Patch

from .harness import ResultTable

_RAW_COLOR = "#7f9fc4"
_CORR_COLOR = "#e0a04d"
_TRUTH_COLOR = "red"


def _box_series(ax, table, column, names, offset, width, color, kind, series):
    data = []
    positions = []
    labels = []
    for j, name in enumerate(names):
        values = table.column(column, name)
        values = values[~np.isnan(values)]
        if values.size == 0:
            continue
        data.append(values)
        positions.append(j + offset)
        labels.append(name)
    if not data:
        return
    bp = ax.boxplot(
        data,
        positions=positions,
        widths=width,
        whis=1.5,
        patch_artist=True,
        manage_ticks=False,
        showfliers=False,
    )
    for artist in bp["boxes"]:
        artist.set_facecolor(color)
        artist.set_alpha(0.7)
    for j, artist in enumerate(bp["boxes"]):
        artist.set_gid(f"box-{kind}-{series}-{labels[j]}")


def emit_boxplot_svg(table: ResultTable, path: str) -> None:
    """Render the replicate spread of every index estimate to an SVG file."""
    if table.replicates_succeeded < 2:
        raise ValueError("boxplots need at least 2 successful replicates")
    has_correction = table.correction_applied
    with mpl.rc_context({"svg.hashsalt": "sobolnoise"}):
        fig = Figure(figsize=(1.6 + 1.1 * (len(table.variables) + 1), 7.0))
        ax_main, ax_total = fig.subplots(2, 1)

        for ax, kind, column_raw, column_corr in (
            (ax_main, "main", "s_raw", "s_corr"),
            (ax_total, "total", "t_raw", "t_corr"),
        ):
            names = list(table.variables)
            if kind == "total" and table.virtual_name:
                names.append(table.virtual_name)
            offset = -0.19 if has_correction else 0.0
            _box_series(ax, table, column_raw, names, offset, 0.32, _RAW_COLOR, kind, "raw")
            if has_correction:
                _box_series(
                    ax, table, column_corr, names, 0.19, 0.32, _CORR_COLOR, kind, "corrected"
                )
            if table.truth is not None:
                truth = table.truth.main if kind == "main" else table.truth.total
                for j, name in enumerate(table.variables):
                    marker = ax.plot(
                        j, truth[j], "o", color=_TRUTH_COLOR, markersize=5, zorder=5
                    )[0]
                    marker.set_gid(f"truth-{kind}-{name}")
            ax.set_xticks(range(len(names)))
            ax.set_xticklabels(names)
            ax.set_ylabel(f"{kind} index")
            ax.grid(True, axis="y", alpha=0.3)

        handles = [Patch(facecolor=_RAW_COLOR, alpha=0.7, label="raw")]
        if has_correction:
            handles.append(Patch(facecolor=_CORR_COLOR, alpha=0.7, label="corrected"))
        if table.truth is not None:
            handles.append(
                mpl.lines.Line2D(
                    [], [], marker="o", color=_TRUTH_COLOR, linestyle="", label="reference"
                )
            )
        ax_main.legend(handles=handles, loc="upper right")
        ax_main.set_title(table.label)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
