"""Listing all minimal adjustment sets with polynomial delay.

On an exposure-loop-free DAG the minimal adjustment sets are exactly the
minimal vertex separators of the ancestor moral graph after the latent and
forbidden vertices are projected away.  Separators are produced by a
divide-and-conquer backtracking over the exposure-side region: each boundary
vertex is either committed to the separator (taken first) or absorbed into
the region, and a subtree is pruned as soon as it can no longer produce a
minimal separator.  The delay between two emissions is therefore polynomial
in the vertex count no matter how many sets remain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .graph import (
    MixedGraph,
    ancestor_graph,
    backdoor_graph,
    moralize,
    require_exposure_loop_free,
)
from .criteria import forbidden_vertices


@dataclass(frozen=True)
class LatentProjection:
    """An undirected graph with a set of banned vertices contracted away.

    Two surviving vertices are adjacent when they were adjacent before or
    joined by a chain running entirely through banned vertices, so the
    separators of the projection are exactly the original separators that
    avoid every banned vertex.
    """

    graph: MixedGraph
    removed: tuple[str, ...]


def latent_project(
    graph: MixedGraph,
    banned: Iterable[str],
    x: Iterable[str],
    y: Iterable[str],
) -> LatentProjection:
    if graph.directed_edges:
        raise ValueError("latent_project expects an undirected graph")
    xs, ys, bs = frozenset(x), frozenset(y), frozenset(banned)
    for v in xs | ys | bs:
        graph.index_of(v)
    overlap = bs & (xs | ys)
    if overlap:
        raise ValueError(
            f"banned vertices overlap the query sets: {sorted(overlap)}"
        )
    if xs & ys:
        raise ValueError("exposure and outcome sets overlap")

    extra: set[tuple[str, str]] = set()
    idx = {v: i for i, v in enumerate(graph.vertices)}
    seen: set[str] = set()
    for seed in graph.vertices:
        if seed not in bs or seed in seen:
            continue
        component = [seed]
        seen.add(seed)
        fringe: set[str] = set()
        qi = 0
        while qi < len(component):
            v = component[qi]
            qi += 1
            for w in graph.neighbors(v):
                if w in bs:
                    if w not in seen:
                        seen.add(w)
                        component.append(w)
                else:
                    fringe.add(w)
        ordered = sorted(fringe, key=idx.__getitem__)
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                extra.add((ordered[i], ordered[j]))

    kept = [v for v in graph.vertices if v not in bs]
    edges = [
        (u, v) for u, v in graph.undirected_edges if u not in bs and v not in bs
    ]
    edges.extend(sorted(extra, key=lambda e: (idx[e[0]], idx[e[1]])))
    return LatentProjection(MixedGraph(kept, (), edges), tuple(sorted(bs, key=idx.__getitem__)))


def list_minimal_separators(
    graph: MixedGraph, x: Iterable[str], y: Iterable[str]
) -> Iterator[list[str]]:
    """Stream every inclusion-minimal vertex set whose removal disconnects
    the two given sets of an undirected graph.

    Deterministic: the recursion always branches on the smallest undecided
    boundary vertex in graph order, trying "in the separator" before
    "outside".  Emits the empty set once when the sets are already apart and
    nothing at all when they are adjacent.
    """
    if graph.directed_edges:
        raise ValueError("list_minimal_separators expects an undirected graph")
    xs = graph.vertex_indices(x)
    ys = graph.vertex_indices(y)
    if xs & ys:
        raise ValueError("the two sets overlap")
    return _separators(graph, xs, ys)


def _separators(graph: MixedGraph, xs: set[int], ys: set[int]) -> Iterator[list[str]]:
    adj = graph._neighbors
    names = graph.vertices

    def boundary(region: set[int]) -> set[int]:
        out: set[int] = set()
        for v in region:
            for w in adj[v]:
                if w not in region:
                    out.add(w)
        return out

    def outcome_reach(blocked: set[int]) -> set[int]:
        seen = {v for v in ys if v not in blocked}
        stack = list(seen)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in blocked and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    # Each frame is (region, committed): vertices known to sit on the
    # exposure side, and boundary vertices committed to the separator.
    stack: list[tuple[set[int], frozenset[int]]] = [(set(xs), frozenset())]
    while stack:
        region, committed = stack.pop()
        dead = False
        while True:
            rim = boundary(region)
            if rim & ys:
                dead = True
                break
            reach = outcome_reach(region | rim)
            forced: set[int] = set()
            for s in rim:
                if not any(w in reach for w in adj[s]):
                    forced.add(s)
            if forced & committed:
                # a committed separator vertex lost its outcome-side support
                dead = True
                break
            if forced:
                region |= forced
                continue
            break
        if dead:
            continue
        undecided = rim - committed
        if not undecided:
            yield [names[i] for i in sorted(committed)]
            continue
        pick = min(undecided)
        stack.append((region | {pick}, committed))   # outside the separator
        stack.append((set(region), committed | {pick}))  # inside, tried first
    return


class AdjustmentStream:
    """Resumable cursor over the minimal adjustment sets of one query.

    Single-consumer: share the underlying analysis, not the stream.  Sets
    come out duplicate-free in a fixed deterministic order; ``next_batch``
    never blocks for longer than one separator-to-separator delay per
    element.
    """

    def __init__(
        self,
        source: Iterator[list[str]],
        no_adjustment_exists: bool,
        verify: "None | tuple" = None,
    ):
        self._source = source
        self._verify = verify
        self.no_adjustment_exists = no_adjustment_exists
        self.emitted = 0
        self.exhausted = no_adjustment_exists

    def __iter__(self) -> Iterator[list[str]]:
        return self

    def __next__(self) -> list[str]:
        if self.exhausted:
            raise StopIteration
        try:
            batch = next(self._source)
        except StopIteration:
            self.exhausted = True
            raise
        if self._verify is not None:
            self._check(batch)
        self.emitted += 1
        return batch

    def next_batch(self, k: int) -> list[list[str]]:
        out: list[list[str]] = []
        for candidate in self:
            out.append(candidate)
            if len(out) >= k:
                break
        return out

    def _check(self, candidate: list[str]) -> None:
        from . import criteria

        graph, xs, ys = self._verify
        z = frozenset(candidate)
        ok, _ = criteria.satisfies_adjustment_criterion(graph, xs, ys, z)
        assert ok, f"stream produced a non-adjustment: {candidate}"
        assert criteria.satisfies_backdoor(graph, xs, ys, z), candidate
        assert criteria.satisfies_moral(graph, xs, ys, z), candidate
        assert criteria.is_minimal(graph, xs, ys, z, "moral"), candidate


def list_minimal_adjustments(
    graph: MixedGraph,
    x: Iterable[str],
    y: Iterable[str],
    latent: Iterable[str] = (),
    verify: bool = __debug__,
) -> AdjustmentStream:
    """All minimal covariate sets that identify the exposure-outcome effect
    and avoid the latent vertices.

    Preconditions: the graph is an exposure-loop-free DAG and the three sets
    are pairwise disjoint.  When no valid adjustment exists at all (an
    unblockable biasing link) the stream is empty and flagged, which is a
    result rather than an error.
    """
    xs, ys, ls = frozenset(x), frozenset(y), frozenset(latent)
    for name, group in (("x", xs), ("y", ys), ("latent", ls)):
        for v in group:
            if v not in graph:
                raise ValueError(f"{name} names unknown vertex {v!r}")
    if xs & ys or xs & ls or ys & ls:
        raise ValueError("exposure, outcome and latent sets must be disjoint")
    if not xs or not ys:
        raise ValueError("exposure and outcome must be nonempty")
    require_exposure_loop_free(graph, xs)

    core = moralize(ancestor_graph(backdoor_graph(graph, xs), xs | ys))
    banned = (ls | set(forbidden_vertices(graph, xs, ys))) & set(core.vertices)
    banned -= xs | ys
    projection = latent_project(core, banned, xs, ys)

    blocked_forever = any(
        projection.graph.has_undirected_edge(a, b) for a in xs for b in ys
    )
    source = list_minimal_separators(projection.graph, xs, ys)
    return AdjustmentStream(
        source,
        no_adjustment_exists=blocked_forever,
        verify=(graph, xs, ys) if verify else None,
    )
