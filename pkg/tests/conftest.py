import random

import pytest

from dagbias.graph import MixedGraph
from dagbias.model import load_sample
from dagbias.oracle import random_dag, sample_roles


@pytest.fixture
def diabetes():
    return load_sample("diabetes")


@pytest.fixture
def coffee():
    return load_sample("coffee")


@pytest.fixture
def admission():
    return load_sample("admission")


@pytest.fixture
def chain():
    return load_sample("chain")


def instance_corpus(
    seed: int,
    count: int,
    n_low: int = 3,
    n_high: int = 9,
    p_low: float = 0.1,
    p_high: float = 0.5,
    x_max: int = 1,
    y_max: int = 1,
    with_z: bool = False,
):
    """Seeded random query instances: (graph, x, y, z)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(max(n_low, x_max + y_max + 1), n_high)
        g = random_dag(rng, n, rng.uniform(p_low, p_high))
        xs, ys = sample_roles(rng, g, rng.randint(1, x_max), rng.randint(1, y_max))
        rest = [v for v in g.vertices if v not in xs | ys]
        zs = frozenset(rng.sample(rest, rng.randint(0, len(rest)))) if with_z else frozenset()
        out.append((g, xs, ys, zs))
    return out


def layered_dag(rng: random.Random, layers: int, width: int, out_degree: int):
    """Layered random DAG plus its layer grid, for scaling tests."""
    grid = [[f"n{l}_{i}" for i in range(width)] for l in range(layers)]
    names = [v for layer in grid for v in layer]
    edges = []
    for l in range(layers - 1):
        for v in grid[l]:
            for t in rng.sample(grid[l + 1], min(out_degree, width)):
                edges.append((v, t))
    return MixedGraph(names, edges), grid


def parallel_routes_gadget(k: int):
    """DAG whose ancestor moral graph has 2**k minimal separators."""
    names = ["x", "y"] + [f"u{i}" for i in range(k)] + [f"v{i}" for i in range(k)]
    edges = []
    for i in range(k):
        edges += [(f"u{i}", "x"), (f"u{i}", f"v{i}"), (f"v{i}", "y")]
    return MixedGraph(names, edges)
