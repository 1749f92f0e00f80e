"""Separation and adjustment criteria.

Three criteria are implemented: the complete adjustment criterion, the
back-door criterion and the moral-graph criterion.  On exposure-loop-free
inputs their minimal satisfying sets coincide, which is what
:func:`is_minimal` exploits.

All checks avoid path enumeration.  Openness of the non-causal paths is
decided through a d-separation test on the graph left after deleting the
first edge of every causal path; a concrete open witness path is only
extracted after a check has already failed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    MixedGraph,
    Path,
    ancestor_graph,
    ancestors,
    backdoor_graph,
    descendants,
    do_graph,
    is_exposure_loop_free,
    moralize,
    require_exposure_loop_free,
)

CRITERIA = ("adjustment", "backdoor", "moral")


def _as_sets(
    graph: MixedGraph, *groups: "tuple[str, set[str] | frozenset[str]]"
) -> list[frozenset[str]]:
    out = []
    for name, group in groups:
        vertices = frozenset(group)
        for v in vertices:
            if v not in graph:
                raise ValueError(f"{name} names unknown vertex {v!r}")
        out.append(vertices)
    names = [name for name, _ in groups]
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            overlap = out[i] & out[j]
            if overlap:
                v = sorted(overlap)[0]
                raise ValueError(f"vertex {v!r} appears in both {names[i]} and {names[j]}")
    return out


def _separated_in_moral(graph: MixedGraph, x: frozenset[str], y: frozenset[str], z: frozenset[str]) -> bool:
    """Connectivity test between x and y after deleting z from the moral
    graph of the ancestor graph of x, y and z."""
    core = moralize(ancestor_graph(graph, x | y | z))
    live = {v for v in core.vertices if v not in z}
    seen = {v for v in x if v in live}
    stack = list(seen)
    while stack:
        for w in core.neighbors(stack.pop()):
            if w in live and w not in seen:
                if w in y:
                    return False
                seen.add(w)
                stack.append(w)
    return not (seen & y)


def d_separated(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
) -> bool:
    """True when ``z`` blocks every path between ``x`` and ``y``."""
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    return _separated_in_moral(graph, xs, ys, zs)


def causal_path_vertices(
    graph: MixedGraph, x: set[str] | frozenset[str], y: set[str] | frozenset[str]
) -> list[str]:
    """Vertices outside the exposure lying on a directed exposure-outcome path."""
    xs, ys = _as_sets(graph, ("x", x), ("y", y))
    down = set(descendants(graph, xs))
    up = set(ancestors(graph, ys))
    return graph.sort_vertices((down & up) - xs)


def forbidden_vertices(
    graph: MixedGraph, x: set[str] | frozenset[str], y: set[str] | frozenset[str]
) -> list[str]:
    """Vertices no valid adjustment may contain: descendants, after removing
    the edges entering the exposure, of any causal-path vertex."""
    on_causal = causal_path_vertices(graph, x, y)
    if not on_causal:
        return []
    return descendants(do_graph(graph, x), on_causal)


def _proper_backdoor_view(graph: MixedGraph, x: frozenset[str], y: frozenset[str]) -> MixedGraph:
    """The graph without the first edge of any causal exposure-outcome path."""
    cut = set(causal_path_vertices(graph, x, y))
    return MixedGraph(
        graph.vertices,
        [(u, v) for u, v in graph.directed_edges if not (u in x and v in cut)],
        graph.undirected_edges,
    )


def find_open_path(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
    skip_causal: bool = False,
) -> Path | None:
    """Lexicographically least open path from ``x`` to ``y`` given ``z``.

    Paths are ordered by their vertex-index sequences.  The search walks the
    skeleton depth-first in vertex order and prunes a prefix as soon as one
    of its interior vertices violates the openness conditions, so it only
    ever extends open prefixes.  With ``skip_causal`` fully directed paths
    are not reported.
    """
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    an_z = set(ancestors(graph, zs)) if zs else set()

    order = {v: i for i, v in enumerate(graph.vertices)}
    skeleton: dict[str, list[tuple[str, bool]]] = {v: [] for v in graph.vertices}
    for u, v in graph.directed_edges:
        skeleton[u].append((v, True))
        skeleton[v].append((u, False))
    for neigh in skeleton.values():
        neigh.sort(key=lambda item: order[item[0]])

    def extend(trail: list[str], arrows: list[bool], seen: set[str]) -> Path | None:
        here = trail[-1]
        if here in ys and len(trail) > 1:
            if not (skip_causal and all(arrows)):
                return Path.from_vertices(graph, trail)
        for nxt, forward in skeleton[here]:
            if nxt in seen:
                continue
            if len(trail) > 1:
                # `here` becomes an interior vertex once we extend.
                collider = arrows[-1] and not forward
                if collider:
                    if here not in an_z:
                        continue
                elif here in zs:
                    continue
            trail.append(nxt)
            arrows.append(forward)
            seen.add(nxt)
            hit = extend(trail, arrows, seen)
            if hit is not None:
                return hit
            seen.remove(nxt)
            arrows.pop()
            trail.pop()
        return None

    for start in graph.sort_vertices(xs):
        hit = extend([start], [], {start})
        if hit is not None:
            return hit
    return None


def satisfies_adjustment_criterion(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
) -> tuple[bool, Path | None]:
    """Complete criterion: ``z`` avoids every forbidden vertex and blocks all
    non-causal exposure-outcome paths.

    Returns the verdict and, on failure, an open non-causal witness path when
    one exists.
    """
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    clean = not (zs & set(forbidden_vertices(graph, xs, ys)))
    blocked = _separated_in_moral(_proper_backdoor_view(graph, xs, ys), xs, ys, zs)
    if clean and blocked:
        return True, None
    return False, find_open_path(graph, xs, ys, zs, skip_causal=True)


def satisfies_backdoor(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
) -> bool:
    """Back-door criterion: ``z`` holds no descendant of the exposure and
    separates exposure from outcome once the edges leaving the exposure are
    removed."""
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    if zs & set(descendants(graph, xs)):
        return False
    return _separated_in_moral(backdoor_graph(graph, xs), xs, ys, zs)


def _ancestor_moral_core(graph: MixedGraph, xs: frozenset[str], ys: frozenset[str]) -> MixedGraph:
    return moralize(ancestor_graph(backdoor_graph(graph, xs), xs | ys))


def _moral_cut(core: MixedGraph, xs: frozenset[str], ys: frozenset[str], zs: frozenset[str]) -> bool:
    seen = {v for v in xs if v not in zs}
    stack = list(seen)
    while stack:
        for w in core.neighbors(stack.pop()):
            if w not in zs and w not in seen:
                seen.add(w)
                stack.append(w)
    return not (seen & ys)


def satisfies_moral(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
) -> bool:
    """Moral-graph criterion: ``z`` stays inside the ancestors of exposure
    and outcome (minus exposure descendants) and cuts them apart in the
    ancestor moral graph."""
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    allowed = set(ancestors(graph, xs | ys)) - set(descendants(graph, xs))
    if not zs <= allowed:
        return False
    return _moral_cut(_ancestor_moral_core(graph, xs, ys), xs, ys, zs)


_CHECKS = {
    "adjustment": lambda g, x, y, z: satisfies_adjustment_criterion(g, x, y, z)[0],
    "backdoor": satisfies_backdoor,
    "moral": satisfies_moral,
}


def is_minimal(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str],
    criterion: str = "adjustment",
) -> bool:
    """True when no proper subset of ``z`` satisfies the named criterion.

    Requires an exposure-loop-free graph, where minimality under any one
    criterion coincides with minimality under all three.  Because separation
    in an undirected graph survives removing extra vertices, it suffices to
    test the moral criterion on ``z`` itself and on every single-vertex
    deletion.
    """
    if criterion not in _CHECKS:
        raise ValueError(f"unknown criterion {criterion!r}")
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    require_exposure_loop_free(graph, xs)
    if not _CHECKS[criterion](graph, xs, ys, zs):
        raise ValueError(f"the given set does not satisfy the {criterion} criterion")
    allowed = set(ancestors(graph, xs | ys)) - set(descendants(graph, xs))
    if not zs <= allowed:
        return False
    core = _ancestor_moral_core(graph, xs, ys)
    if not _moral_cut(core, xs, ys, zs):
        return False

    # A separator of an undirected graph is minimal exactly when each of its
    # members has a neighbor on both shores, so two sweeps settle all the
    # single-vertex deletions at once.
    def shore(seeds: frozenset[str]) -> set[str]:
        seen = {v for v in seeds if v not in zs}
        stack = list(seen)
        while stack:
            for w in core.neighbors(stack.pop()):
                if w not in zs and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    side_x = shore(xs)
    side_y = shore(ys)
    return all(
        any(w in side_x for w in core.neighbors(s))
        and any(w in side_y for w in core.neighbors(s))
        for s in zs
    )


@dataclass(frozen=True)
class CriterionReport:
    """All criterion verdicts for one (graph, x, y, z) query."""

    adjustment_criterion: bool
    backdoor_criterion: bool
    moral_criterion: bool
    exposure_loop_free: bool
    forbidden: tuple[str, ...]
    witness: Path | None

    @property
    def ok(self) -> bool:
        return self.adjustment_criterion


def criterion_report(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
) -> CriterionReport:
    xs, ys, zs = _as_sets(graph, ("x", x), ("y", y), ("z", z))
    adjustment, witness = satisfies_adjustment_criterion(graph, xs, ys, zs)
    return CriterionReport(
        adjustment_criterion=adjustment,
        backdoor_criterion=satisfies_backdoor(graph, xs, ys, zs),
        moral_criterion=satisfies_moral(graph, xs, ys, zs),
        exposure_loop_free=is_exposure_loop_free(graph, xs),
        forbidden=tuple(forbidden_vertices(graph, xs, ys)),
        witness=witness,
    )
