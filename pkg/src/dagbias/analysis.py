"""One-shot full analysis of a diagram.

The CLI, the HTTP service and the figure renderer all consume the same
:class:`AnalysisResult`, so their outputs can never drift apart.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .criteria import CriterionReport, criterion_report
from .enumeration import list_minimal_adjustments
from .errors import NotExposureLoopFreeError
from .forks import BiasingEdges, biasing_edges
from .graph import is_exposure_loop_free
from .model import DiagramDocument


@dataclass
class AnalysisResult:
    document: DiagramDocument
    exposure: tuple[str, ...]
    outcome: tuple[str, ...]
    adjusted: tuple[str, ...]
    latent: tuple[str, ...]
    exposure_loop_free: bool
    criteria: CriterionReport
    biasing: BiasingEdges
    adjustments: list[list[str]]
    truncated: bool
    no_adjustment_exists: bool
    enumeration_skipped: str | None
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)


def analyze(
    doc: DiagramDocument,
    adjusted_override: frozenset[str] | None = None,
    latent_override: frozenset[str] | None = None,
    max_adjustments: int = 20,
    deadline: float | None = None,
    enumerate_sets: bool = True,
) -> AnalysisResult:
    """Run criteria, biasing-edge identification and adjustment enumeration.

    ``deadline`` bounds the enumeration phase in seconds; hitting it sets the
    ``truncated`` flag, which is meaningful because every already-emitted set
    is final.  Raises ``ValueError`` when the document lacks an exposure or
    outcome or when the requested sets overlap.
    """
    graph = doc.graph
    roles = doc.roles
    x = roles.exposure
    y = roles.outcome
    z = doc.adjusted_or(adjusted_override)
    latent = roles.latent if latent_override is None else latent_override
    if not x or not y:
        raise ValueError("an exposure and an outcome vertex are required")

    timings: dict[str, float] = {}
    warnings: list[str] = []

    t0 = time.perf_counter()
    report = criterion_report(graph, x, y, z)
    timings["criteria"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bias = biasing_edges(graph, x, y, z)
    timings["biasing_edges"] = time.perf_counter() - t0
    if bias.adjusted_descendants:
        warnings.append(
            "adjusted set contains descendants of the exposure; biasing paths "
            "that start along a causal edge are not reported"
        )

    loop_free = report.exposure_loop_free
    adjustments: list[list[str]] = []
    truncated = False
    no_adjustment = False
    skipped: str | None = None
    t0 = time.perf_counter()
    if not enumerate_sets:
        pass
    elif not loop_free:
        skipped = "graph is not exposure-loop-free; minimal sets are not enumerable"
        warnings.append(skipped)
    else:
        stream = list_minimal_adjustments(graph, x, y, latent)
        no_adjustment = stream.no_adjustment_exists
        stop = None if deadline is None else time.monotonic() + deadline
        for candidate in stream:
            if len(adjustments) >= max_adjustments:
                truncated = True  # one further set provably exists
                break
            adjustments.append(candidate)
            if stop is not None and time.monotonic() > stop:
                truncated = True
                break
    timings["enumeration"] = time.perf_counter() - t0

    return AnalysisResult(
        document=doc,
        exposure=tuple(graph.sort_vertices(x)),
        outcome=tuple(graph.sort_vertices(y)),
        adjusted=tuple(graph.sort_vertices(z)),
        latent=tuple(graph.sort_vertices(latent)),
        exposure_loop_free=loop_free,
        criteria=report,
        biasing=bias,
        adjustments=adjustments,
        truncated=truncated,
        no_adjustment_exists=no_adjustment,
        enumeration_skipped=skipped,
        warnings=warnings,
        timings=timings,
    )
