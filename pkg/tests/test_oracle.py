import random

import pytest

from dagbias.errors import BudgetExceededError
from dagbias.graph import MixedGraph, Path
from dagbias.model import parse
from dagbias.oracle import (
    OracleBudget,
    all_simple_paths,
    brute_biasing_edges,
    brute_bottlenecks,
    brute_minimal_adjustments,
    find_nonequivalence_counterexample,
    path_is_open,
    random_dag,
)


class TestSimplePaths:
    def test_diabetes_count(self, diabetes):
        paths = all_simple_paths(diabetes.graph, {"LE"}, {"D"})
        assert [str(p) for p in paths] == [
            "LE -> D",
            "LE <- FI -> MD -> D",
            "LE <- FI -> MD <- MR -> D",
        ]

    def test_chain_single_path(self, chain):
        paths = all_simple_paths(chain.graph, {"x"}, {"y"})
        assert [str(p) for p in paths] == ["x -> m -> y"]

    def test_disconnected_pair(self):
        g = MixedGraph(["a", "b"])
        assert all_simple_paths(g, {"a"}, {"b"}) == []

    def test_budget_rejects_large_graphs(self):
        g = random_dag(random.Random(0), 12, 0.3)
        with pytest.raises(BudgetExceededError):
            all_simple_paths(g, {"v1"}, {"v12"})

    def test_path_cap(self, diabetes):
        tight = OracleBudget(max_paths=1)
        with pytest.raises(BudgetExceededError):
            all_simple_paths(diabetes.graph, {"LE"}, {"D"}, tight)


class TestPathOpenness:
    def test_coffee_confounding_route(self, coffee):
        p = Path.from_vertices(coffee.graph, ["C", "U", "S", "H"])
        assert path_is_open(coffee.graph, p, set())
        assert not path_is_open(coffee.graph, p, {"S"})

    def test_admission_collider(self, admission):
        p = Path.from_vertices(admission.graph, ["R", "H", "S"])
        assert path_is_open(admission.graph, p, {"H"})
        assert not path_is_open(admission.graph, p, set())

    def test_collider_opened_by_descendant(self):
        g = MixedGraph([], [("a", "c"), ("b", "c"), ("c", "d")])
        p = Path.from_vertices(g, ["a", "c", "b"])
        assert path_is_open(g, p, {"d"})

    def test_foreign_path_rejected(self, coffee, chain):
        p = Path.from_vertices(chain.graph, ["x", "m"])
        with pytest.raises(ValueError):
            path_is_open(coffee.graph, p, set())


class TestBruteAdjustments:
    def test_diabetes(self, diabetes):
        got = brute_minimal_adjustments(diabetes.graph, {"LE"}, {"D"})
        assert got == {frozenset({"FI"}), frozenset({"MD", "MR"})}

    def test_chain_empty_set(self, chain):
        assert brute_minimal_adjustments(chain.graph, {"x"}, {"y"}) == {frozenset()}

    def test_coffee_with_latent(self, coffee):
        got = brute_minimal_adjustments(coffee.graph, {"C"}, {"H"}, {"U"})
        assert got == {frozenset({"S"})}


class TestBruteBiasing:
    def test_diabetes_unadjusted(self, diabetes):
        assert brute_biasing_edges(diabetes.graph, {"LE"}, {"D"}) == {
            ("FI", "LE"),
            ("FI", "MD"),
            ("MD", "D"),
        }

    def test_diabetes_adjusting_income_clears(self, diabetes):
        assert brute_biasing_edges(diabetes.graph, {"LE"}, {"D"}, {"FI"}) == set()

    def test_chain_has_none(self, chain):
        assert brute_biasing_edges(chain.graph, {"x"}, {"y"}) == set()


class TestBruteBottlenecks:
    def test_funnel(self):
        g = MixedGraph([], [("v", "w"), ("w", "x"), ("w", "y")])
        table = brute_bottlenecks(g, {"x"}, {"y"})
        from dagbias.graph import topological_numbering

        t = topological_numbering(g)
        assert table["v"] == t["w"]
        assert table["w"] == t["w"]

    def test_diamond(self):
        g = MixedGraph([], [("v", "a"), ("v", "b"), ("a", "x"), ("b", "y")])
        table = brute_bottlenecks(g, {"x"}, {"y"})
        from dagbias.graph import topological_numbering

        assert table["v"] == topological_numbering(g)["v"]

    def test_one_sided_vertex_is_undefined(self):
        g = MixedGraph(["y"], [("v", "x")])
        assert brute_bottlenecks(g, {"x"}, {"y"})["v"] is None


class TestCounterexampleSearch:
    def test_finds_and_reproduces(self):
        hit = find_nonequivalence_counterexample(0, attempts=3000)
        assert hit is not None
        assert find_nonequivalence_counterexample(0, attempts=3000) == hit

    def test_hits_are_never_loop_free(self):
        from dagbias.graph import is_exposure_loop_free

        hit = find_nonequivalence_counterexample(0, attempts=3000)
        assert not is_exposure_loop_free(hit.graph, hit.roles.exposure)

    def test_handcrafted_instance_separates_the_criteria(self):
        from itertools import combinations

        from dagbias.oracle import _adjustment_holds_brute, _backdoor_holds_brute, _moral_holds_brute

        doc = parse("dag { x2 [exposure] x3 [exposure] y2 [outcome] g a  x3->g g->a a->x2 y2->a }")
        g, xs, ys = doc.graph, set(doc.roles.exposure), set(doc.roles.outcome)
        subsets = [set(c) for k in range(3) for c in combinations(["g", "a"], k)]
        assert any(_adjustment_holds_brute(g, xs, ys, z) for z in subsets)
        assert not any(_backdoor_holds_brute(g, xs, ys, z) for z in subsets)
        assert not any(_moral_holds_brute(g, xs, ys, z) for z in subsets)
