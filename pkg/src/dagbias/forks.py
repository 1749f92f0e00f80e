"""Fork graphs, bottleneck numbers and biasing-edge identification.

A fork is a path that runs backward along directed edges to one endpoint,
forward to the other, with an undirected stretch in between (any of the
three parts may be empty).  In the fork graph of a DAG under a conditioning
set, the open paths are exactly the forks, which reduces "which edges carry
bias" to "which edges lie on a fork" and admits a linear-time sweep:

1. bottleneck numbers via one dominator computation on the reversed graph,
2. a block-tree labeling of every undirected component, and
3. a forward reachability sweep from the vertices found so far.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .graph import (
    MixedGraph,
    Path,
    _topological_order,
    ancestors,
    backdoor_graph,
    descendants,
)

Edge = tuple[str, str]


class ForkGraph:
    """A mixed graph together with the provenance of each of its edges.

    ``origin`` maps every surviving edge, directed or undirected, to the
    directed edge of the source DAG it came from.  ``conditioned`` records
    the set the construction was run with.
    """

    __slots__ = ("graph", "conditioned", "_undirected_source")

    def __init__(
        self,
        graph: MixedGraph,
        conditioned: frozenset[str],
        undirected_source: dict[tuple[int, int], tuple[int, int]],
    ):
        self.graph = graph
        self.conditioned = conditioned
        self._undirected_source = undirected_source

    @property
    def origin(self) -> dict[Edge, Edge]:
        names = self.graph.vertices
        table: dict[Edge, Edge] = {e: e for e in self.graph.directed_edges}
        for key, (u, v) in self._undirected_source.items():
            table[(names[key[0]], names[key[1]])] = (names[u], names[v])
        return table

    def __repr__(self) -> str:
        return f"ForkGraph({self.graph!r}, conditioned={sorted(self.conditioned)})"


def fork_graph(graph: MixedGraph, z: Iterable[str] = ()) -> ForkGraph:
    """Strip the arrowheads that conditioning on ``z`` makes meaningless.

    For every directed edge: drop it when its tail is conditioned, turn it
    undirected when its head is an ancestor of the conditioning set, keep it
    otherwise.
    """
    if graph.undirected_edges:
        raise ValueError("fork_graph expects a graph with directed edges only")
    zs = frozenset(z)
    zi = graph.vertex_indices(zs)
    _topological_order(graph)  # rejects cyclic input

    parents = graph._parents
    into_z = set(zi)
    stack = list(zi)
    while stack:
        for p in parents[stack.pop()]:
            if p not in into_z:
                into_z.add(p)
                stack.append(p)

    directed: list[tuple[int, int]] = []
    undirected: list[tuple[int, int]] = []
    source: dict[tuple[int, int], tuple[int, int]] = {}
    for u, v in graph._directed:
        if u in zi:
            continue
        if v in into_z:
            key = (u, v) if u < v else (v, u)
            undirected.append(key)
            source[key] = (u, v)
        else:
            directed.append((u, v))
    built = MixedGraph._from_indexed(graph._vertices, graph._index, directed, undirected)
    return ForkGraph(built, zs, source)


def _host(graph: MixedGraph | ForkGraph) -> MixedGraph:
    return graph.graph if isinstance(graph, ForkGraph) else graph


def is_fork(
    graph: MixedGraph | ForkGraph,
    path: Path,
    x: Iterable[str],
    y: Iterable[str],
) -> bool:
    """Whether the given exposure-outcome path is a fork of the host graph.

    The step sequence must read backward*, undirected*, forward*; each of
    the three runs may be empty.
    """
    host = _host(graph)
    xs, ys = frozenset(x), frozenset(y)
    if not path.exists_in(host):
        raise ValueError(f"path {path} does not exist in the graph")
    if path.vertices[0] not in xs or path.vertices[-1] not in ys:
        raise ValueError("path must run from the exposure set to the outcome set")
    steps = path.steps
    i = 0
    while i < len(steps) and steps[i] == "backward":
        i += 1
    j = len(steps)
    while j > i and steps[j - 1] == "forward":
        j -= 1
    return all(steps[k] == "undirected" for k in range(i, j))


@dataclass(frozen=True)
class BottleneckTable:
    """Topological and bottleneck numbers of a mixed graph.

    ``bottleneck[v]`` is the largest topological number of a vertex through
    which every directed path from ``v`` to the exposure side and every
    directed path from ``v`` to the outcome side must pass; it is ``None``
    for vertices that do not reach both sides.
    """

    numbering: dict[str, int]
    bottleneck: dict[str, int | None]


class _SweepData(NamedTuple):
    order: list[int]          # topological order of vertex indices
    numbers: list[int]        # 1-based topological number per vertex index
    reach_x: list[bool]
    reach_y: list[bool]
    funnel: list[int]         # max-T common bottleneck toward whatever is reachable; -1 if nothing
    joint: list[int]          # same, but -1 unless both sides are reachable


def _directed_reach(children: list[list[int]], parents: list[list[int]], seeds: set[int]) -> list[bool]:
    n = len(children)
    out = [False] * n
    stack = []
    for s in seeds:
        out[s] = True
        stack.append(s)
    while stack:
        v = stack.pop()
        for p in parents[v]:
            if not out[p]:
                out[p] = True
                stack.append(p)
    return out


def _sweep(graph: MixedGraph, x: Iterable[str], y: Iterable[str]) -> _SweepData:
    """Single pass computing reachability and bottleneck funnels.

    The funnel of a vertex is found through immediate dominators on the
    reversed graph, where every exposure vertex feeds one virtual sink,
    every outcome vertex another, and both sinks feed a common root.  The
    vertices dominating ``v`` from that root are exactly the ones on every
    directed path from ``v`` to either side; processing a DAG in one
    topological pass makes each immediate dominator the nearest common
    ancestor of the already-placed predecessors.
    """
    xs = graph.vertex_indices(x)
    ys = graph.vertex_indices(y)
    if xs & ys:
        raise ValueError("exposure and outcome sets overlap")
    n = len(graph.vertices)
    children = graph._children
    parents = graph._parents

    order = _topological_order(graph)
    numbers = [0] * n
    for i, v in enumerate(order):
        numbers[v] = i + 1

    reach_x = _directed_reach(children, parents, xs)
    reach_y = _directed_reach(children, parents, ys)

    # virtual nodes: n = exposure sink, n + 1 = outcome sink, n + 2 = root
    sink_x, sink_y, root = n, n + 1, n + 2
    unset = -2
    idom = [unset] * (n + 3)
    depth = [0] * (n + 3)
    funnel_all = [-1] * (n + 3)
    idom[root] = root
    idom[sink_x] = root
    idom[sink_y] = root
    depth[sink_x] = depth[sink_y] = 1

    def meet(a: int, b: int) -> int:
        while a != b:
            if depth[a] < depth[b]:
                b = idom[b]
            else:
                a = idom[a]
        return a

    for v in reversed(order):
        dom = unset
        for c in children[v]:
            if idom[c] == unset:
                continue
            dom = c if dom == unset else meet(dom, c)
        if v in xs:
            dom = sink_x if dom == unset else meet(dom, sink_x)
        if v in ys:
            dom = sink_y if dom == unset else meet(dom, sink_y)
        if dom == unset:
            continue
        idom[v] = dom
        depth[v] = depth[dom] + 1
        funnel_all[v] = max(funnel_all[dom], numbers[v])

    funnel = funnel_all[:n]
    joint = [
        funnel[v] if (reach_x[v] and reach_y[v]) else -1
        for v in range(n)
    ]
    return _SweepData(order, numbers, reach_x, reach_y, funnel, joint)


def bottleneck_numbers(
    graph: MixedGraph | ForkGraph, x: Iterable[str], y: Iterable[str]
) -> BottleneckTable:
    """Exact bottleneck numbers over the directed part of the graph."""
    host = _host(graph)
    data = _sweep(host, x, y)
    names = host.vertices
    numbering = {names[v]: data.numbers[v] for v in range(len(names))}
    bottleneck = {
        names[v]: (data.joint[v] if data.joint[v] >= 0 else None)
        for v in range(len(names))
    }
    return BottleneckTable(numbering, bottleneck)


# -- block structure -----------------------------------------------------------


def _biconnected_blocks(adj: list[list[int]]) -> tuple[list[list[tuple[int, int]]], list[bool]]:
    """Biconnected components (as edge lists) and articulation flags of an
    undirected graph over nodes ``0..len(adj)-1``.  Iterative."""
    n = len(adj)
    disc = [-1] * n
    low = [0] * n
    parent = [-1] * n
    cursor = [0] * n
    articulation = [False] * n
    blocks: list[list[tuple[int, int]]] = []
    edge_stack: list[tuple[int, int]] = []
    counter = 0

    for start in range(n):
        if disc[start] >= 0:
            continue
        disc[start] = low[start] = counter
        counter += 1
        root_children = 0
        stack = [start]
        while stack:
            v = stack[-1]
            neighbors = adj[v]
            advanced = False
            while cursor[v] < len(neighbors):
                w = neighbors[cursor[v]]
                cursor[v] += 1
                if disc[w] < 0:
                    parent[w] = v
                    disc[w] = low[w] = counter
                    counter += 1
                    if v == start:
                        root_children += 1
                    edge_stack.append((v, w))
                    stack.append(w)
                    advanced = True
                    break
                if w != parent[v] and disc[w] < disc[v]:
                    edge_stack.append((v, w))
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1]
                if low[v] < low[u]:
                    low[u] = low[v]
                if low[v] >= disc[u]:
                    block = []
                    while edge_stack:
                        e = edge_stack.pop()
                        block.append(e)
                        if e == (u, v):
                            break
                    if block:
                        blocks.append(block)
                    if parent[u] >= 0:
                        articulation[u] = True
        # a root separates only when it has two or more DFS children
        if root_children > 1:
            articulation[start] = True
    return blocks, articulation


def _component_label_vertices(
    members: list[int],
    und_adj: list[list[int]],
    funnel: list[int],
    reach_x: list[bool],
    reach_y: list[bool],
    local_scratch: list[int],
) -> set[int]:
    """Vertices of one undirected component that sit on a fork middle.

    Classes group the component's vertices by funnel value.  Two classes can
    anchor a fork when one of them contains a vertex with a directed path to
    the exposure, the other one to the outcome, and the values differ.  Per
    class a pendant gadget (an anchor pair joined by one edge, the inner
    anchor tied to every member) turns "on a simple path between two
    anchored classes" into a block-tree labeling problem.
    """
    m = len(members)
    local = local_scratch
    for i, g in enumerate(members):
        local[g] = i
    value_to_class: dict[int, int] = {}
    class_values: list[int] = []
    member_class = [-1] * m
    for i, g in enumerate(members):
        value = funnel[g]
        if value >= 0:
            k = value_to_class.get(value)
            if k is None:
                k = len(class_values)
                value_to_class[value] = k
                class_values.append(value)
            member_class[i] = k
    c = len(class_values)
    if c < 2:
        return set()

    # component copy plus one anchor pair (t, s) per class: t = m + 2k, s = m + 2k + 1
    total = m + 2 * c
    adj: list[list[int]] = [[] for _ in range(total)]
    for i, g in enumerate(members):
        row = adj[i]
        for w in und_adj[g]:
            row.append(local[w])
        k = member_class[i]
        if k >= 0:
            t = m + 2 * k
            row.append(t)
            adj[t].append(i)
    for k in range(c):
        t, s = m + 2 * k, m + 2 * k + 1
        adj[t].append(s)
        adj[s].append(t)

    blocks, articulation = _biconnected_blocks(adj)
    n_blocks = len(blocks)

    # block-cut tree: nodes 0..n_blocks-1 are blocks, higher ids articulation vertices
    tree_adj: list[list[int]] = [[] for _ in range(n_blocks)]
    art_node: dict[int, int] = {}
    class_leaf = [-1] * c
    for b, edges in enumerate(blocks):
        nodes_here: set[int] = set()
        for a, d in edges:
            nodes_here.add(a)
            nodes_here.add(d)
        for v in nodes_here:
            if v >= m and (v - m) % 2 == 1:
                class_leaf[(v - m) // 2] = b
            if articulation[v]:
                t = art_node.get(v)
                if t is None:
                    t = len(tree_adj)
                    art_node[v] = t
                    tree_adj.append([])
                tree_adj[b].append(t)
                tree_adj[t].append(b)

    has_rx = [False] * c
    has_ry = [False] * c
    for i, g in enumerate(members):
        k = member_class[i]
        if k >= 0:
            if reach_x[g]:
                has_rx[k] = True
            if reach_y[g]:
                has_ry[k] = True

    n_tree = len(tree_adj)
    rx_cnt = [0] * n_tree
    rx_sum = [0] * n_tree
    ry_cnt = [0] * n_tree
    ry_sum = [0] * n_tree
    for k in range(c):
        b = class_leaf[k]
        if has_rx[k]:
            rx_cnt[b] += 1
            rx_sum[b] += class_values[k]
        if has_ry[k]:
            ry_cnt[b] += 1
            ry_sum[b] += class_values[k]
    total_rx = (sum(rx_cnt), sum(rx_sum))
    total_ry = (sum(ry_cnt), sum(ry_sum))

    # root the tree at node 0 and accumulate subtree sums bottom-up
    parent_of = [-2] * n_tree
    parent_of[0] = -1
    order_nodes = [0]
    qi = 0
    while qi < len(order_nodes):
        node = order_nodes[qi]
        qi += 1
        for nxt in tree_adj[node]:
            if parent_of[nxt] == -2:
                parent_of[nxt] = node
                order_nodes.append(nxt)
    for node in reversed(order_nodes):
        up = parent_of[node]
        if up >= 0:
            rx_cnt[up] += rx_cnt[node]
            rx_sum[up] += rx_sum[node]
            ry_cnt[up] += ry_cnt[node]
            ry_sum[up] += ry_sum[node]

    def straddles(cb: int, sb: int, ca: int, sa: int) -> bool:
        if cb < 1 or ca < 1:
            return False
        return not (cb == 1 and ca == 1 and sb == sa)

    labeled = [False] * n_blocks
    for node in order_nodes:
        up = parent_of[node]
        if up < 0:
            continue
        below_rx = (rx_cnt[node], rx_sum[node])
        below_ry = (ry_cnt[node], ry_sum[node])
        above_rx = (total_rx[0] - below_rx[0], total_rx[1] - below_rx[1])
        above_ry = (total_ry[0] - below_ry[0], total_ry[1] - below_ry[1])
        if straddles(*below_rx, *above_ry) or straddles(*below_ry, *above_rx):
            if node < n_blocks:
                labeled[node] = True
            if up < n_blocks:
                labeled[up] = True

    labeled_vertices: set[int] = set()
    for b in range(n_blocks):
        if not labeled[b]:
            continue
        for a, d in blocks[b]:
            if a < m and d < m:
                labeled_vertices.add(members[a])
                labeled_vertices.add(members[d])
    return labeled_vertices


def _fork_vertex_indices(host: MixedGraph, x: Iterable[str], y: Iterable[str]) -> set[int]:
    data = _sweep(host, x, y)
    n = len(host.vertices)
    numbers = data.numbers
    joint = data.joint

    seeds = {v for v in range(n) if joint[v] >= 0 and joint[v] == numbers[v]}

    und_adj = host._neighbors
    seen = bytearray(n)
    local_scratch = [0] * n
    for start in range(n):
        if seen[start] or not und_adj[start]:
            continue
        members = [start]
        seen[start] = 1
        qi = 0
        while qi < len(members):
            v = members[qi]
            qi += 1
            for w in und_adj[v]:
                if not seen[w]:
                    seen[w] = 1
                    members.append(w)
        seeds |= _component_label_vertices(
            members, und_adj, data.funnel, data.reach_x, data.reach_y, local_scratch
        )

    swept = bytearray(n)
    stack = list(seeds)
    for v in seeds:
        swept[v] = 1
    children = host._children
    funnel = data.funnel
    out = set(seeds)
    while stack:
        v = stack.pop()
        for w in children[v]:
            if not swept[w]:
                swept[w] = 1
                stack.append(w)
                if funnel[w] >= 0:
                    out.add(w)
    return out


def identify_fork_vertices(
    graph: MixedGraph | ForkGraph, x: Iterable[str], y: Iterable[str]
) -> list[str]:
    """Every vertex lying on some fork between the two sets, in vertex order.

    Linear in the size of the graph: a vertex qualifies when it has two
    side-disjoint directed escapes (its bottleneck number equals its own
    topological number), when an undirected stretch places it between two
    suitably anchored funnel classes, or when a directed path from such a
    vertex reaches it and it still reaches one of the sides.
    """
    host = _host(graph)
    return host.names(_fork_vertex_indices(host, x, y))


class BiasingEdges(NamedTuple):
    """Edges on open biasing paths, plus a flag raised when the conditioning
    set contains descendants of the exposure (paths whose first edge leaves
    the exposure are then outside the construction's reach)."""

    edges: list[Edge]
    adjusted_descendants: bool


def biasing_edges(
    graph: MixedGraph,
    x: Iterable[str],
    y: Iterable[str],
    z: Iterable[str] = (),
) -> BiasingEdges:
    """All directed edges of the input DAG lying on an open non-causal path
    between exposure and outcome, in input edge order.

    Works on the fork graph of the back-door graph: an edge survives exactly
    when both of its endpoints lie on forks there.
    """
    xs, ys, zs = frozenset(x), frozenset(y), frozenset(z)
    for name, group in (("x", xs), ("y", ys), ("z", zs)):
        for v in group:
            if v not in graph:
                raise ValueError(f"{name} names unknown vertex {v!r}")
    if xs & ys or xs & zs or ys & zs:
        raise ValueError("exposure, outcome and conditioning sets must be disjoint")

    warning = bool(zs & set(descendants(graph, xs)))

    # One fused pass builds the fork graph of the back-door graph directly.
    n = len(graph._vertices)
    xi = graph.vertex_indices(xs)
    zi = graph.vertex_indices(zs)
    parents = graph._parents
    into_z = bytearray(n)
    stack = list(zi)
    for v in zi:
        into_z[v] = 1
    while stack:
        v = stack.pop()
        skip_into_x = v not in xi
        for p in parents[v]:
            if p in xi and skip_into_x:
                continue  # this edge is absent from the back-door graph
            if not into_z[p]:
                into_z[p] = 1
                stack.append(p)
    directed: list[tuple[int, int]] = []
    undirected: list[tuple[int, int]] = []
    survivors: list[tuple[int, int, int]] = []  # (edge index, endpoint, endpoint)
    for ei, (u, v) in enumerate(graph._directed):
        if u in xi and v not in xi:
            continue
        if u in zi:
            continue
        if into_z[v]:
            undirected.append((u, v) if u < v else (v, u))
        else:
            directed.append((u, v))
        survivors.append((ei, u, v))
    fg_host = MixedGraph._from_indexed(graph._vertices, graph._index, directed, undirected)

    on_fork = bytearray(len(graph._vertices))
    for v in _fork_vertex_indices(fg_host, xs, ys):
        on_fork[v] = 1
    keep = bytearray(len(graph._directed))
    for ei, u, v in survivors:
        if on_fork[u] and on_fork[v]:
            keep[ei] = 1
    names = graph.vertices
    ordered = [
        (names[u], names[v])
        for ei, (u, v) in enumerate(graph._directed)
        if keep[ei]
    ]
    return BiasingEdges(ordered, warning)
