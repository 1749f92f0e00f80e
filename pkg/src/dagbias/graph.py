"""Mixed-graph core.

One graph type serves every stage of the pipeline: the input causal DAG
(directed edges only), moral graphs (undirected only) and fork graphs
(both kinds).  Graphs are immutable after construction; every operation
below returns a new graph or a plain value, so concurrent readers need no
locking.

Vertex identity is the textual name.  The vertex tuple keeps first-appearance
order and all deterministic tie-breaking (topological numbering, set output
order) uses that order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Literal

from .errors import CyclicGraphError, NotExposureLoopFreeError

StepKind = Literal["forward", "backward", "undirected"]


class MixedGraph:
    """Vertices plus directed and undirected edges.

    Invariants enforced at construction:

    * no self-loops,
    * at most one edge between a pair of vertices in a given direction;
      a directed edge and an undirected edge may not share an endpoint pair
      (an opposing pair of directed edges is representable, so that cycle
      checks can reject it with a useful error).
    """

    __slots__ = (
        "_vertices",
        "_index",
        "_directed",
        "_undirected",
        "_children",
        "_parents",
        "_neighbors",
    )

    def __init__(
        self,
        vertices: Iterable[str] = (),
        directed_edges: Iterable[tuple[str, str]] = (),
        undirected_edges: Iterable[tuple[str, str]] = (),
    ):
        order: list[str] = []
        index: dict[str, int] = {}

        def intern(name: str) -> int:
            pos = index.get(name)
            if pos is None:
                pos = len(order)
                index[name] = pos
                order.append(name)
            return pos

        for v in vertices:
            intern(v)

        directed: list[tuple[int, int]] = []
        undirected: list[tuple[int, int]] = []
        seen_directed: set[tuple[int, int]] = set()
        seen_pairs: dict[tuple[int, int], str] = {}

        for u, v in directed_edges:
            ui, vi = intern(u), intern(v)
            if ui == vi:
                raise ValueError(f"self-loop on {u!r}")
            if (ui, vi) in seen_directed:
                continue
            pair = (ui, vi) if ui < vi else (vi, ui)
            kind = seen_pairs.get(pair)
            if kind == "undirected":
                raise ValueError(f"both directed and undirected edge between {u!r} and {v!r}")
            seen_directed.add((ui, vi))
            seen_pairs[pair] = "directed"
            directed.append((ui, vi))

        for u, v in undirected_edges:
            ui, vi = intern(u), intern(v)
            if ui == vi:
                raise ValueError(f"self-loop on {u!r}")
            pair = (ui, vi) if ui < vi else (vi, ui)
            kind = seen_pairs.get(pair)
            if kind == "directed":
                raise ValueError(f"both directed and undirected edge between {u!r} and {v!r}")
            if kind == "undirected":
                continue
            seen_pairs[pair] = "undirected"
            undirected.append(pair)

        n = len(order)
        children: list[list[int]] = [[] for _ in range(n)]
        parents: list[list[int]] = [[] for _ in range(n)]
        neighbors: list[list[int]] = [[] for _ in range(n)]
        for ui, vi in directed:
            children[ui].append(vi)
            parents[vi].append(ui)
        for ui, vi in undirected:
            neighbors[ui].append(vi)
            neighbors[vi].append(ui)

        self._vertices = tuple(order)
        self._index = index
        self._directed = tuple(directed)
        self._undirected = tuple(undirected)
        self._children = children
        self._parents = parents
        self._neighbors = neighbors

    @classmethod
    def _from_indexed(
        cls,
        vertices: tuple[str, ...],
        index: dict[str, int],
        directed: "list[tuple[int, int]] | tuple",
        undirected: "list[tuple[int, int]] | tuple",
    ) -> "MixedGraph":
        """Unvalidated constructor for edges already known to be consistent,
        used when deriving one graph from another."""
        self = object.__new__(cls)
        n = len(vertices)
        children: list[list[int]] = [[] for _ in range(n)]
        parents: list[list[int]] = [[] for _ in range(n)]
        neighbors: list[list[int]] = [[] for _ in range(n)]
        for u, v in directed:
            children[u].append(v)
            parents[v].append(u)
        for u, v in undirected:
            neighbors[u].append(v)
            neighbors[v].append(u)
        self._vertices = vertices
        self._index = index
        self._directed = tuple(directed)
        self._undirected = tuple(undirected)
        self._children = children
        self._parents = parents
        self._neighbors = neighbors
        return self

    # -- basic accessors ----------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def directed_edges(self) -> list[tuple[str, str]]:
        vs = self._vertices
        return [(vs[u], vs[v]) for u, v in self._directed]

    @property
    def undirected_edges(self) -> list[tuple[str, str]]:
        vs = self._vertices
        return [(vs[u], vs[v]) for u, v in self._undirected]

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, vertex: str) -> bool:
        return vertex in self._index

    def index_of(self, vertex: str) -> int:
        try:
            return self._index[vertex]
        except KeyError:
            raise ValueError(f"unknown vertex {vertex!r}") from None

    def parents(self, vertex: str) -> list[str]:
        vs = self._vertices
        return [vs[i] for i in self._parents[self.index_of(vertex)]]

    def children(self, vertex: str) -> list[str]:
        vs = self._vertices
        return [vs[i] for i in self._children[self.index_of(vertex)]]

    def neighbors(self, vertex: str) -> list[str]:
        """Endpoints of undirected edges at ``vertex``."""
        vs = self._vertices
        return [vs[i] for i in self._neighbors[self.index_of(vertex)]]

    def has_directed_edge(self, u: str, v: str) -> bool:
        return self._has_directed(u, v)

    def _has_directed(self, u: str, v: str) -> bool:
        ui = self._index.get(u)
        vi = self._index.get(v)
        if ui is None or vi is None:
            return False
        return vi in self._children[ui]

    def has_undirected_edge(self, u: str, v: str) -> bool:
        ui = self._index.get(u)
        vi = self._index.get(v)
        if ui is None or vi is None:
            return False
        return vi in self._neighbors[ui]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and set(self._directed) == set(other._directed)
            and set(self._undirected) == set(other._undirected)
        )

    def __hash__(self) -> int:
        return hash((self._vertices, frozenset(self._directed), frozenset(self._undirected)))

    def __repr__(self) -> str:
        return (
            f"MixedGraph({len(self._vertices)} vertices, "
            f"{len(self._directed)} directed, {len(self._undirected)} undirected)"
        )

    # -- index-level views used by the algorithm modules ---------------------

    def vertex_indices(self, vertices: Iterable[str]) -> set[int]:
        return {self.index_of(v) for v in vertices}

    def names(self, indices: Iterable[int]) -> list[str]:
        vs = self._vertices
        return [vs[i] for i in sorted(indices)]

    def sort_vertices(self, vertices: Iterable[str]) -> list[str]:
        """Return the given vertices in graph order."""
        return self.names(self.vertex_indices(vertices))


@dataclass(frozen=True)
class RoleAssignment:
    """Partition of the covariates into the four analysis roles."""

    exposure: frozenset[str] = frozenset()
    outcome: frozenset[str] = frozenset()
    adjusted: frozenset[str] = frozenset()
    latent: frozenset[str] = frozenset()

    def check_against(self, graph: MixedGraph, require_query_roles: bool = False) -> None:
        groups = {
            "exposure": self.exposure,
            "outcome": self.outcome,
            "adjusted": self.adjusted,
            "latent": self.latent,
        }
        for name, group in groups.items():
            for v in group:
                if v not in graph:
                    raise ValueError(f"{name} names unknown vertex {v!r}")
        names = list(groups)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                overlap = groups[a] & groups[b]
                if overlap:
                    victim = sorted(overlap)[0]
                    raise ValueError(f"vertex {victim!r} is both {a} and {b}")
        if require_query_roles and (not self.exposure or not self.outcome):
            raise ValueError("an exposure and an outcome vertex are required")


@dataclass(frozen=True)
class Path:
    """Vertex sequence with one orientation tag per step.

    A step is tagged relative to traversal order: ``forward`` for an edge
    pointing with the walk, ``backward`` against it, ``undirected`` for an
    undirected edge.  A single vertex is a valid path of length zero.
    """

    vertices: tuple[str, ...]
    steps: tuple[StepKind, ...] = ()

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("a path needs at least one vertex")
        if len(self.steps) != len(self.vertices) - 1:
            raise ValueError("step count must be one less than vertex count")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("path vertices must be distinct")

    @classmethod
    def from_vertices(cls, graph: MixedGraph, vertices: Iterable[str]) -> "Path":
        """Build a path from a vertex sequence, inferring each step kind."""
        seq = tuple(vertices)
        steps: list[StepKind] = []
        for a, b in zip(seq, seq[1:]):
            if graph._has_directed(a, b):
                steps.append("forward")
            elif graph._has_directed(b, a):
                steps.append("backward")
            elif graph.has_undirected_edge(a, b):
                steps.append("undirected")
            else:
                raise ValueError(f"no edge between {a!r} and {b!r}")
        return cls(seq, tuple(steps))

    def exists_in(self, graph: MixedGraph) -> bool:
        for (a, b), kind in zip(zip(self.vertices, self.vertices[1:]), self.steps):
            if kind == "forward":
                ok = graph._has_directed(a, b)
            elif kind == "backward":
                ok = graph._has_directed(b, a)
            else:
                ok = graph.has_undirected_edge(a, b)
            if not ok:
                return False
        return True

    @property
    def length(self) -> int:
        return len(self.steps)

    def is_directed(self) -> bool:
        """True when every edge points with the walk."""
        return all(s == "forward" for s in self.steps)

    def __str__(self) -> str:
        marks = {"forward": " -> ", "backward": " <- ", "undirected": " -- "}
        out = [self.vertices[0]]
        for step, v in zip(self.steps, self.vertices[1:]):
            out.append(marks[step])
            out.append(v)
        return "".join(out)


# -- reachability ------------------------------------------------------------


def _closure(adj: list[list[int]], seeds: Iterable[int]) -> set[int]:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def ancestors(graph: MixedGraph, vertices: Iterable[str]) -> list[str]:
    """Every vertex with a directed path into the given set, the set included."""
    seeds = graph.vertex_indices(vertices)
    return graph.names(_closure(graph._parents, seeds))


def descendants(graph: MixedGraph, vertices: Iterable[str]) -> list[str]:
    """Every vertex reachable from the given set by directed edges, the set included."""
    seeds = graph.vertex_indices(vertices)
    return graph.names(_closure(graph._children, seeds))


def ancestor_graph(graph: MixedGraph, vertices: Iterable[str]) -> MixedGraph:
    """Induced subgraph on the ancestors of the given set."""
    keep = _closure(graph._parents, graph.vertex_indices(vertices))
    vs = graph._vertices
    names = tuple(vs[i] for i in range(len(vs)) if i in keep)
    remap = {old: new for new, old in enumerate(i for i in range(len(vs)) if i in keep)}
    return MixedGraph._from_indexed(
        names,
        {name: i for i, name in enumerate(names)},
        [(remap[u], remap[v]) for u, v in graph._directed if u in keep and v in keep],
        [(remap[u], remap[v]) for u, v in graph._undirected if u in keep and v in keep],
    )


def moralize(graph: MixedGraph) -> MixedGraph:
    """Marry all co-parents, then drop every orientation.

    Only defined for graphs whose edges are all directed.
    """
    if graph._undirected:
        raise ValueError("moralize expects a graph with directed edges only")
    vs = graph._vertices
    pair_seen: set[tuple[int, int]] = set()
    out: list[tuple[int, int]] = []

    def add(a: int, b: int) -> None:
        pair = (a, b) if a < b else (b, a)
        if pair not in pair_seen:
            pair_seen.add(pair)
            out.append(pair)

    for u, v in graph._directed:
        add(u, v)
    for v in range(len(vs)):
        ps = graph._parents[v]
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                add(ps[i], ps[j])
    return MixedGraph._from_indexed(vs, graph._index, (), out)


def backdoor_graph(graph: MixedGraph, exposure: Iterable[str]) -> MixedGraph:
    """Drop every directed edge that leaves the exposure set."""
    x = graph.vertex_indices(exposure)
    return MixedGraph._from_indexed(
        graph._vertices,
        graph._index,
        [(u, v) for u, v in graph._directed if not (u in x and v not in x)],
        graph._undirected,
    )


def do_graph(graph: MixedGraph, exposure: Iterable[str]) -> MixedGraph:
    """Drop every directed edge that enters the exposure set."""
    x = graph.vertex_indices(exposure)
    return MixedGraph._from_indexed(
        graph._vertices,
        graph._index,
        [(u, v) for u, v in graph._directed if v not in x],
        graph._undirected,
    )


def _topological_order(graph: MixedGraph) -> list[int]:
    """Kahn's algorithm over the directed part, input order breaking ties."""
    n = len(graph._vertices)
    indeg = [len(graph._parents[v]) for v in range(n)]
    ready = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in graph._children[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != n:
        leftover = min(v for v in range(n) if indeg[v] > 0)
        raise CyclicGraphError(graph._vertices[leftover])
    return order


def topological_numbering(graph: MixedGraph) -> dict[str, int]:
    """Injective 1-based numbering increasing along every directed edge.

    Undirected edges are ignored.  Ties are broken by vertex input order, so
    the result is deterministic for a given graph.
    """
    order = _topological_order(graph)
    vs = graph._vertices
    return {vs[v]: i + 1 for i, v in enumerate(order)}


def _exposure_loop(graph: MixedGraph, exposure: Iterable[str]) -> list[str] | None:
    """A directed path of two or more edges from the set back into the set
    with every interior vertex outside it, or None."""
    x = graph.vertex_indices(exposure)
    # hop[v], for v outside x, points one step along a directed path from v
    # back into x that stays outside x until the final edge.
    hop: dict[int, int] = {}
    stack: list[int] = []
    for xi in x:
        for p in graph._parents[xi]:
            if p not in x and p not in hop:
                hop[p] = xi
                stack.append(p)
    while stack:
        v = stack.pop()
        for p in graph._parents[v]:
            if p not in x and p not in hop:
                hop[p] = v
                stack.append(p)
    vs = graph._vertices
    best: list[str] | None = None
    for xi in sorted(x):
        for c in graph._children[xi]:
            if c in hop:
                trail = [vs[xi], vs[c]]
                cur = c
                while cur not in x:
                    cur = hop[cur]
                    trail.append(vs[cur])
                if best is None or len(trail) < len(best):
                    best = trail
                break
    return best


def is_exposure_loop_free(graph: MixedGraph, exposure: Iterable[str]) -> bool:
    """False when some directed path of length two or more starts and ends in
    the exposure set with its interior outside it."""
    return _exposure_loop(graph, exposure) is None


def require_exposure_loop_free(graph: MixedGraph, exposure: Iterable[str]) -> None:
    loop = _exposure_loop(graph, exposure)
    if loop is not None:
        raise NotExposureLoopFreeError(loop)
