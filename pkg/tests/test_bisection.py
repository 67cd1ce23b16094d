from __future__ import annotations

import itertools

import numpy as np
import pytest
from helpers import mesh_edges, small_circuit
from hypothesis import given, settings
from hypothesis import strategies as st

from vlsidec import textio
from vlsidec.bec_sim import replicate_code, sample_regular_code
from vlsidec.bisection import (
    BisectionError,
    CircuitGraph,
    bits_summary,
    dumps_graph,
    dumps_tree,
    loads_graph,
    min_bisect_exact,
    min_bisect_heuristic,
    nested_bisect,
)


def brute_width(g: CircuitGraph) -> int:
    marked = sorted(g.marked)
    best = None
    for mask in range(2 ** (g.n_vertices - 1)):
        side = [(mask >> v) & 1 for v in range(g.n_vertices)]
        diff = sum(1 if side[v] == 0 else -1 for v in marked)
        if abs(diff) > 1:
            continue
        w = sum(m for u, v, m in g.edges if side[u] != side[v])
        best = w if best is None else min(best, w)
    return best


def test_complete_graph_k4():
    g = CircuitGraph.build(4, itertools.combinations(range(4), 2))
    assert min_bisect_exact(g).width == 4
    assert min_bisect_heuristic(g).width == 4


def test_path_width_one():
    g = CircuitGraph.build(9, [(i, i + 1) for i in range(8)])
    b = min_bisect_exact(g)
    assert b.width == 1
    assert abs(len(b.sides[0]) - len(b.sides[1])) <= 1


def test_only_marked_vertices_need_balance():
    # star: centre unmarked, so the leaves can split with the centre on either side
    g = CircuitGraph.build(5, [(0, i) for i in range(1, 5)], marked=[1, 2, 3, 4])
    assert min_bisect_exact(g).width == 2


def test_multiplicities_count():
    g = CircuitGraph.build(2, [(0, 1), (0, 1), (1, 0)])
    assert g.edges == ((0, 1, 3),)
    assert min_bisect_exact(g).width == 3


def test_exact_tie_break_is_lexicographic():
    g = CircuitGraph.build(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    b = min_bisect_exact(g)
    assert b.width == 2
    assert b.sides[0] == frozenset({0, 1})


def test_exact_refuses_over_budget():
    g = CircuitGraph.build(30, [(i, i + 1) for i in range(29)])
    with pytest.raises(BisectionError, match="heuristic"):
        min_bisect_exact(g)


def test_too_few_marked():
    g = CircuitGraph.build(3, [(0, 1), (1, 2)], marked=[0])
    with pytest.raises(BisectionError):
        min_bisect_exact(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_exact_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    edges = rng.integers(0, n, size=(int(rng.integers(0, 3 * n)), 2))
    marked = [v for v in range(n) if rng.random() < 0.7]
    if len(marked) < 2:
        marked = [0, n - 1]
    g = CircuitGraph.build(n, edges.tolist(), marked=marked)
    w = min_bisect_exact(g).width
    assert w == brute_width(g)
    assert min_bisect_heuristic(g, restarts=4, seed=seed).width >= w


def test_heuristic_is_deterministic_per_seed():
    g = CircuitGraph.from_tanner(sample_regular_code(32, 3, 4, seed=1))
    a = min_bisect_heuristic(g, seed=7)
    b = min_bisect_heuristic(g, seed=7)
    assert a == b


def test_mesh_nested_bisection():
    g = CircuitGraph.build(16, mesh_edges(4), inputs=range(16))
    for mode in ("exact", "heuristic"):
        tree = nested_bisect(g, 2, tau=3.0, mode=mode)
        assert tree.B_r == 16 * 3.0
        assert [leaf.n_inputs for leaf in tree.leaves] == [4, 4, 4, 4]
        assert sum(leaf.f for leaf in tree.leaves) == 2 * sum(c[2] for c in tree.cut_edges)


def test_bits_summary_and_accounting():
    g = CircuitGraph.build(16, mesh_edges(4), inputs=range(16))
    tree = nested_bisect(g, 2, tau=1.0, mode="exact")
    cuts = sum(m for _, _, m, _ in tree.cut_edges)
    assert tree.B_r == 2 * cuts
    s = bits_summary(tree)
    assert s.n_histogram == {4: 4}
    assert s.B_r == tree.B_r
    assert s.min_b == min(tree.b(i) for i in range(4))


def test_stage_count_limit_reported():
    g = CircuitGraph.build(6, [(i, i + 1) for i in range(5)], marked=[0, 1, 2, 3, 4])
    with pytest.raises(BisectionError, match="maximal feasible r is 2"):
        nested_bisect(g, 3, 1.0)


def test_disjoint_copies_split_for_free():
    base = sample_regular_code(8, 3, 4, seed=3)
    code = replicate_code(base, 8)
    g = CircuitGraph.from_tanner(code)
    tree = nested_bisect(g, 3, tau=4.0)
    assert tree.B_r == 0
    assert all(leaf.k_outputs == base.k for leaf in tree.leaves)


def test_from_tanner_marks_first_k_variables():
    code = sample_regular_code(12, 3, 4, seed=0)
    g = CircuitGraph.from_tanner(code)
    assert g.n_vertices == 12 + 9
    assert g.marked == frozenset(range(3))
    assert g.inputs == frozenset(range(12))


def test_from_circuit_contracts_blocks():
    g = CircuitGraph.from_circuit(small_circuit())
    # A, B, L, G, O are separate nodes; four nets give four edges
    assert g.n_vertices == 5
    assert sum(m for *_, m in g.edges) == 4
    assert len(g.marked) == 1 and len(g.inputs) == 2


def test_graph_and_tree_text():
    g = CircuitGraph.build(16, mesh_edges(4), marked=range(8), inputs=range(16))
    assert loads_graph(dumps_graph(g)) == g
    tree = nested_bisect(g, 2, 1.0, mode="exact")
    doc = textio.parse(dumps_tree(tree, "exact"))
    assert float(doc.require("B_r")) == tree.B_r
    assert [int(row[1]) for row in doc.rows("leaves")] == [leaf.f for leaf in tree.leaves]


def test_loads_graph_accepts_tanner_files():
    from vlsidec.tanner_layout import dumps

    code = sample_regular_code(12, 3, 4, seed=0)
    assert loads_graph(dumps(code)) == CircuitGraph.from_tanner(code)
