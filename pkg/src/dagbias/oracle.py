"""Brute-force reference implementations.

Everything in this module decides questions by explicit enumeration: all
simple paths, all subsets, all directed-path families.  The routines are the
ground truth that the fast algorithms in :mod:`criteria`, :mod:`forks` and
:mod:`enumeration` are tested against, so they deliberately share no code
with those modules.  Only the :class:`~dagbias.graph.MixedGraph` data type
and its plain accessors are used.

Budgets are hard caps: an oracle refuses oversized inputs instead of running
without bound.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import combinations

from .errors import BudgetExceededError
from .graph import MixedGraph, Path, RoleAssignment, topological_numbering


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 9
    max_paths: int = 200_000
    time_limit: float | None = None

    def admit(self, graph: MixedGraph) -> None:
        if len(graph) > self.max_vertices:
            raise BudgetExceededError(
                f"{len(graph)} vertices exceed the oracle budget of {self.max_vertices}"
            )


DEFAULT_BUDGET = OracleBudget()


class _Deadline:
    def __init__(self, budget: OracleBudget):
        self.max_paths = budget.max_paths
        self.expires = None if budget.time_limit is None else time.monotonic() + budget.time_limit
        self.count = 0

    def tick(self) -> None:
        self.count += 1
        if self.count > self.max_paths:
            raise BudgetExceededError(f"more than {self.max_paths} paths enumerated")
        if self.expires is not None and time.monotonic() > self.expires:
            raise BudgetExceededError("oracle time budget exhausted")


# -- local reachability helpers (kept independent of graph.py's operations) --


def _reach_up(graph: MixedGraph, seeds: set[str]) -> set[str]:
    out = set(seeds)
    stack = list(seeds)
    while stack:
        for p in graph.parents(stack.pop()):
            if p not in out:
                out.add(p)
                stack.append(p)
    return out


def _reach_down(graph: MixedGraph, seeds: set[str]) -> set[str]:
    out = set(seeds)
    stack = list(seeds)
    while stack:
        for c in graph.children(stack.pop()):
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def _without_edges_leaving(graph: MixedGraph, x: set[str]) -> MixedGraph:
    return MixedGraph(
        graph.vertices,
        [(u, v) for u, v in graph.directed_edges if not (u in x and v not in x)],
        graph.undirected_edges,
    )


def _without_edges_entering(graph: MixedGraph, x: set[str]) -> MixedGraph:
    return MixedGraph(
        graph.vertices,
        [(u, v) for u, v in graph.directed_edges if v not in x],
        graph.undirected_edges,
    )


# -- path enumeration ---------------------------------------------------------


def all_simple_paths(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    budget: OracleBudget = DEFAULT_BUDGET,
) -> list[Path]:
    """Every simple path from a vertex of ``x`` to a vertex of ``y``.

    Edge orientation is ignored while walking; each emitted :class:`Path`
    records the orientation of every step.  Paths come out in depth-first
    order with neighbors visited in vertex order, so the listing is
    deterministic.
    """
    budget.admit(graph)
    for v in x | y:
        graph.index_of(v)
    deadline = _Deadline(budget)
    paths: list[Path] = []

    skeleton: dict[str, list[str]] = {v: [] for v in graph.vertices}
    for u, v in graph.directed_edges:
        skeleton[u].append(v)
        skeleton[v].append(u)
    for u, v in graph.undirected_edges:
        skeleton[u].append(v)
        skeleton[v].append(u)
    order = {v: i for i, v in enumerate(graph.vertices)}
    for v in skeleton:
        skeleton[v].sort(key=order.__getitem__)

    def walk(trail: list[str], seen: set[str]) -> None:
        here = trail[-1]
        if here in y and len(trail) > 1:
            deadline.tick()
            paths.append(Path.from_vertices(graph, trail))
        for nxt in skeleton[here]:
            if nxt not in seen:
                trail.append(nxt)
                seen.add(nxt)
                walk(trail, seen)
                seen.remove(nxt)
                trail.pop()

    for start in graph.sort_vertices(x):
        walk([start], {start})
    return paths


def path_is_open(graph: MixedGraph, path: Path, z: set[str] | frozenset[str]) -> bool:
    """Literal d-connection test for one path.

    A non-collider on the path must lie outside ``z``; a collider must be an
    ancestor of ``z`` (itself included).
    """
    if not path.exists_in(graph):
        raise ValueError(f"path {path} does not exist in the graph")
    an_z = _reach_up(graph, set(z))
    for i in range(1, len(path.vertices) - 1):
        into = path.steps[i - 1] == "forward"
        outof = path.steps[i] == "backward"
        v = path.vertices[i]
        if into and outof:
            if v not in an_z:
                return False
        else:
            if v in z:
                return False
    return True


def _directed_paths_to(
    graph: MixedGraph, start: str, targets: set[str], deadline: _Deadline
) -> list[list[str]]:
    """All directed paths from ``start`` ending at a vertex of ``targets``."""
    found: list[list[str]] = []

    def walk(trail: list[str], seen: set[str]) -> None:
        here = trail[-1]
        if here in targets:
            deadline.tick()
            found.append(list(trail))
        for nxt in graph.children(here):
            if nxt not in seen:
                trail.append(nxt)
                seen.add(nxt)
                walk(trail, seen)
                seen.remove(nxt)
                trail.pop()

    walk([start], {start})
    return found


def _proper_causal_x_y_paths(
    graph: MixedGraph, x: set[str], y: set[str], deadline: _Deadline
) -> list[list[str]]:
    """Directed paths from the exposure to the outcome whose only exposure
    vertex is the first one."""
    out = []
    for start in sorted(x):
        for trail in _directed_paths_to(graph, start, set(y), deadline):
            if all(v not in x for v in trail[1:]):
                out.append(trail)
    return out


def _forbidden_brute(
    graph: MixedGraph, x: set[str], y: set[str], deadline: _Deadline
) -> set[str]:
    """Descendants, in the graph with edges into ``x`` removed, of every
    non-exposure vertex on a proper causal exposure-outcome path."""
    on_causal: set[str] = set()
    for path in _proper_causal_x_y_paths(graph, x, y, deadline):
        on_causal.update(path)
    on_causal -= x
    return _reach_down(_without_edges_entering(graph, x), on_causal)


def _adjustment_holds_brute(
    graph: MixedGraph,
    x: set[str],
    y: set[str],
    z: set[str],
    budget: OracleBudget = DEFAULT_BUDGET,
) -> bool:
    """Literal complete criterion: no forbidden vertex adjusted and every
    open proper path between exposure and outcome is causal.

    Paths that revisit the exposure set are exempt because the adjustment
    formula conditions on the exposure, which blocks them implicitly.
    """
    deadline = _Deadline(budget)
    if z & _forbidden_brute(graph, x, y, deadline):
        return False
    for path in all_simple_paths(graph, x, y, budget):
        if any(v in x for v in path.vertices[1:]):
            continue
        if path.is_directed():
            continue
        if path_is_open(graph, path, z):
            return False
    return True


def _backdoor_holds_brute(
    graph: MixedGraph,
    x: set[str],
    y: set[str],
    z: set[str],
    budget: OracleBudget = DEFAULT_BUDGET,
) -> bool:
    if z & _reach_down(graph, set(x)):
        return False
    pruned = _without_edges_leaving(graph, x)
    for path in all_simple_paths(pruned, x, y, budget):
        if path_is_open(pruned, path, z):
            return False
    return True


def _moral_holds_brute(
    graph: MixedGraph,
    x: set[str],
    y: set[str],
    z: set[str],
    budget: OracleBudget = DEFAULT_BUDGET,
) -> bool:
    allowed = _reach_up(graph, set(x) | set(y)) - _reach_down(graph, set(x))
    if not z <= allowed:
        return False
    pruned = _without_edges_leaving(graph, x)
    keep = _reach_up(pruned, set(x) | set(y))
    skeleton: dict[str, set[str]] = {v: set() for v in keep}
    for u, v in pruned.directed_edges:
        if u in keep and v in keep:
            skeleton[u].add(v)
            skeleton[v].add(u)
    for v in keep:
        ps = [p for p in pruned.parents(v) if p in keep] if v in keep else []
        for a, b in combinations(ps, 2):
            skeleton[a].add(b)
            skeleton[b].add(a)
    live = keep - set(z)
    seen = {v for v in x if v in live}
    stack = list(seen)
    while stack:
        for w in skeleton[stack.pop()]:
            if w in live and w not in seen:
                seen.add(w)
                stack.append(w)
    return not (seen & set(y))


def brute_minimal_adjustments(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    latent: set[str] | frozenset[str] = frozenset(),
    budget: OracleBudget = DEFAULT_BUDGET,
) -> set[frozenset[str]]:
    """All inclusion-minimal covariate sets passing the complete criterion,
    found by testing every subset of the candidates."""
    budget.admit(graph)
    x, y, latent = set(x), set(y), set(latent)
    candidates = [v for v in graph.vertices if v not in x | y | latent]
    passing: list[frozenset[str]] = []
    for k in range(len(candidates) + 1):
        for combo in combinations(candidates, k):
            z = set(combo)
            if _adjustment_holds_brute(graph, x, y, z, budget):
                passing.append(frozenset(z))
    return {
        z for z in passing
        if not any(other < z for other in passing)
    }


def brute_biasing_edges(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    z: set[str] | frozenset[str] = frozenset(),
    budget: OracleBudget = DEFAULT_BUDGET,
) -> set[tuple[str, str]]:
    """Union of the directed edges on open non-causal paths after removing
    the edges that leave the exposure set."""
    budget.admit(graph)
    x, y, z = set(x), set(y), set(z)
    pruned = _without_edges_leaving(graph, x)
    edges: set[tuple[str, str]] = set()
    for path in all_simple_paths(pruned, x, y, budget):
        if path.is_directed():
            continue
        if not path_is_open(pruned, path, z):
            continue
        for (a, b), kind in zip(zip(path.vertices, path.vertices[1:]), path.steps):
            edges.add((a, b) if kind == "forward" else (b, a))
    return edges


def brute_bottlenecks(
    graph: MixedGraph,
    x: set[str] | frozenset[str],
    y: set[str] | frozenset[str],
    budget: OracleBudget = DEFAULT_BUDGET,
) -> dict[str, int | None]:
    """Bottleneck numbers by explicit enumeration of directed path families.

    For a vertex that reaches both sets, the value is the largest topological
    number of a vertex lying on every directed path to the exposure side and
    every directed path to the outcome side.  Vertices missing a path to
    either side map to ``None``.
    """
    budget.admit(graph)
    x, y = set(x), set(y)
    numbering = topological_numbering(graph)
    deadline = _Deadline(budget)
    table: dict[str, int | None] = {}
    for v in graph.vertices:
        to_x = _directed_paths_to(graph, v, x, deadline)
        to_y = _directed_paths_to(graph, v, y, deadline)
        if not to_x or not to_y:
            table[v] = None
            continue
        common: set[str] | None = None
        for trail in to_x + to_y:
            vertices = set(trail)
            common = vertices if common is None else common & vertices
        assert common
        table[v] = max(numbering[w] for w in common)
    return table


# -- randomized instances ------------------------------------------------------


def random_dag(rng: random.Random, n: int, p: float, prefix: str = "v") -> MixedGraph:
    """Random DAG on ``n`` ranked vertices; each forward pair is an edge with
    probability ``p``."""
    names = [f"{prefix}{i}" for i in range(1, n + 1)]
    edges = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return MixedGraph(names, edges)


def sample_roles(
    rng: random.Random, graph: MixedGraph, x_size: int = 1, y_size: int = 1
) -> tuple[frozenset[str], frozenset[str]]:
    picked = rng.sample(list(graph.vertices), x_size + y_size)
    return frozenset(picked[:x_size]), frozenset(picked[x_size:])


def _has_exposure_loop_brute(graph: MixedGraph, x: set[str]) -> bool:
    deadline = _Deadline(DEFAULT_BUDGET)
    for start in x:
        for child in graph.children(start):
            if child in x:
                continue
            for trail in _directed_paths_to(graph, child, x, deadline):
                if all(v not in x for v in trail[:-1]):
                    return True
    return False


def find_nonequivalence_counterexample(
    seed: int, attempts: int = 4000
) -> "DiagramDocument | None":
    """Search small diagrams for an instance where some set satisfies the
    complete adjustment criterion while no set satisfies the back-door
    criterion.

    Such instances require a directed path leaving and re-entering the
    exposure set; the search is deterministic for a fixed seed and returns
    ``None`` when the attempt budget runs out.
    """
    from .model import DiagramDocument

    rng = random.Random(seed)
    for _ in range(attempts):
        n = rng.choice((4, 5, 6))
        graph = random_dag(rng, n, rng.uniform(0.25, 0.55))
        vertices = list(graph.vertices)
        picks = rng.sample(vertices, 3)
        x = {picks[0], picks[1]}
        y = {picks[2]}
        if not _has_exposure_loop_brute(graph, x):
            continue
        candidates = [v for v in vertices if v not in x | y]
        subsets = [
            set(combo)
            for k in range(len(candidates) + 1)
            for combo in combinations(candidates, k)
        ]
        if any(_backdoor_holds_brute(graph, x, y, z) for z in subsets):
            continue
        if not any(_adjustment_holds_brute(graph, x, y, z) for z in subsets):
            continue
        roles = RoleAssignment(exposure=frozenset(x), outcome=frozenset(y))
        return DiagramDocument(graph, roles)
    return None
