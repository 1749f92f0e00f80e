"""Figure rendering and delimited report output.

``render_report`` writes two files per diagram: a ``.txt`` with the full
analysis as tab-separated records and a ``.png`` drawing of the diagram in
the usual visual language: biasing edges bold and red, adjusted vertices
boxed, latent vertices dimmed.
"""

from __future__ import annotations

from pathlib import Path as FilePath

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from .analysis import AnalysisResult
from .graph import MixedGraph


def layered_layout(graph: MixedGraph) -> dict[str, tuple[float, float]]:
    """Deterministic positions: columns by longest-path depth, rows by
    vertex order within each column."""
    depth: dict[str, int] = {}
    for v in graph.vertices:
        depth[v] = 0
    changed = True
    # longest-path layering; the graph is small and acyclic
    order = list(graph.vertices)
    while changed:
        changed = False
        for u, v in graph.directed_edges:
            if depth[v] < depth[u] + 1:
                depth[v] = depth[u] + 1
                changed = True
    columns: dict[int, list[str]] = {}
    for v in order:
        columns.setdefault(depth[v], []).append(v)
    positions: dict[str, tuple[float, float]] = {}
    for col, members in columns.items():
        for row, v in enumerate(members):
            positions[v] = (float(col), -(row - (len(members) - 1) / 2.0))
    return positions


def analysis_records(result: AnalysisResult) -> list[tuple[str, str]]:
    """The full analysis as (key, value) rows; keys repeat for list values."""

    def join(values) -> str:
        values = list(values)
        return ", ".join(values) if values else "{}"

    rep = result.criteria
    rows: list[tuple[str, str]] = [
        ("exposure", join(result.exposure)),
        ("outcome", join(result.outcome)),
        ("adjusted", join(result.adjusted)),
        ("latent", join(result.latent)),
        ("exposure-loop-free", "true" if rep.exposure_loop_free else "false"),
        ("adjustment-criterion", "true" if rep.adjustment_criterion else "false"),
        ("backdoor-criterion", "true" if rep.backdoor_criterion else "false"),
        ("moral-criterion", "true" if rep.moral_criterion else "false"),
        ("forbidden", join(rep.forbidden)),
    ]
    if rep.witness is not None:
        rows.append(("witness", str(rep.witness)))
    for u, v in result.biasing.edges:
        rows.append(("biasing-edge", f"{u} -> {v}"))
    for group in result.adjustments:
        rows.append(("adjustment-set", join(group)))
    rows.append(("truncated", "true" if result.truncated else "false"))
    rows.append(("no-adjustment-exists", "true" if result.no_adjustment_exists else "false"))
    for warning in result.warnings:
        rows.append(("warning", warning))
    return rows


def draw_diagram(result: AnalysisResult, ax=None):
    """Draw the analyzed diagram onto a matplotlib axes."""
    graph = result.document.graph
    roles = result.document.roles
    adjusted = set(result.adjusted)
    latent = set(result.latent)
    biasing = set(result.biasing.edges)
    positions = layered_layout(graph)

    if ax is None:
        ax = plt.gca()
    ax.set_axis_off()

    for u, v in graph.directed_edges:
        hot = (u, v) in biasing
        arrow = FancyArrowPatch(
            positions[u],
            positions[v],
            arrowstyle="-|>",
            mutation_scale=14,
            shrinkA=14,
            shrinkB=14,
            color="crimson" if hot else "0.45",
            linewidth=2.4 if hot else 1.2,
            zorder=1,
        )
        ax.add_patch(arrow)

    for v in graph.vertices:
        x, y = positions[v]
        if v in adjusted:
            box = dict(boxstyle="square,pad=0.35", facecolor="#cfe3ff", edgecolor="black", linewidth=1.4)
        elif v in roles.exposure or v in roles.outcome:
            box = dict(boxstyle="round,pad=0.3", facecolor="#fff2c4", edgecolor="black")
        elif v in latent:
            box = dict(boxstyle="round,pad=0.3", facecolor="#eeeeee", edgecolor="0.6", linestyle="--")
        else:
            box = dict(boxstyle="round,pad=0.3", facecolor="white", edgecolor="black")
        ax.text(
            x, y, v,
            ha="center", va="center",
            fontsize=11,
            fontweight="bold" if (v in roles.exposure or v in roles.outcome) else "normal",
            color="0.45" if v in latent else "black",
            bbox=box,
            zorder=2,
        )

    xs = [p[0] for p in positions.values()]
    ys = [p[1] for p in positions.values()]
    ax.set_xlim(min(xs) - 0.7, max(xs) + 0.7)
    ax.set_ylim(min(ys) - 0.7, max(ys) + 0.7)
    return ax


def render_report(result: AnalysisResult, outdir: FilePath, stem: str) -> list[FilePath]:
    """Write ``<stem>.txt`` and ``<stem>.png`` under ``outdir``."""
    outdir.mkdir(parents=True, exist_ok=True)
    text_path = outdir / f"{stem}.txt"
    with text_path.open("w", encoding="utf-8") as fh:
        for key, value in analysis_records(result):
            fh.write(f"{key}\t{value}\n")

    n_cols = len({p[0] for p in layered_layout(result.document.graph).values()})
    fig, ax = plt.subplots(figsize=(max(4.0, 2.0 * n_cols), 4.0))
    draw_diagram(result, ax)
    verdict = "satisfied" if result.criteria.adjustment_criterion else "not satisfied"
    ax.set_title(f"{stem}: adjustment criterion {verdict}", fontsize=11)
    figure_path = outdir / f"{stem}.png"
    fig.savefig(figure_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return [text_path, figure_path]
