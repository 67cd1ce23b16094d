"""Minimum bisection of a marked vertex subset and r-stage nested bisection.

A bisection of the marked set ``S`` splits *all* vertices into two sides so
that the marked counts differ by at most one; its width is the number of
edges (with multiplicity) between the sides.  Unmarked vertices may go
either way.

Bit accounting follows the bidirectional-wire convention: ``f_i`` counts the
endpoints of deleted edges that lie in leaf ``i``, so every deleted wire adds
one to each of its two leaves and ``B_r = tau * sum(f_i) = 2 * tau * cuts``.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from vlsidec import textio

EXACT_BUDGET = 24


class BisectionError(ValueError):
    """Raised when a bisection request cannot be satisfied."""


@dataclass(frozen=True)
class CircuitGraph:
    """Undirected multigraph on vertices ``0 .. n_vertices-1``.

    ``edges`` holds ``(u, v, multiplicity)`` with ``u < v``; parallel edges
    passed to :meth:`build` are collapsed into multiplicities and self-loops
    dropped (they can never be cut).
    """

    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    marked: frozenset[int]
    inputs: frozenset[int] = frozenset()

    @classmethod
    def build(
        cls,
        n_vertices: int,
        edges: Iterable[Sequence[int]],
        marked: Iterable[int] | None = None,
        inputs: Iterable[int] = (),
    ) -> CircuitGraph:
        mult: Counter[tuple[int, int]] = Counter()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            m = int(e[2]) if len(e) > 2 else 1
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range for {n_vertices} vertices")
            if m < 0:
                raise ValueError("edge multiplicity must be non-negative")
            if u != v and m:
                mult[(min(u, v), max(u, v))] += m
        marked = frozenset(range(n_vertices)) if marked is None else frozenset(int(v) for v in marked)
        inputs = frozenset(int(v) for v in inputs)
        for name, s in (("marked", marked), ("inputs", inputs)):
            if any(not 0 <= v < n_vertices for v in s):
                raise ValueError(f"{name} set names a vertex outside 0..{n_vertices - 1}")
        return cls(n_vertices, tuple((u, v, m) for (u, v), m in sorted(mult.items())), marked, inputs)

    @classmethod
    def from_tanner(cls, graph) -> CircuitGraph:
        """Variables ``0..n-1`` then checks; the first ``k`` variables are outputs, all variables inputs."""
        n = graph.n_var
        return cls.build(
            n + graph.n_chk,
            ((v, n + c) for v, c in graph.edges),
            marked=range(graph.k),
            inputs=range(n),
        )

    @classmethod
    def from_circuit(cls, circuit) -> CircuitGraph:
        """Contract a grid circuit to its node graph.

        Adjacent node cells that are not joined by a wire merge into one
        vertex (a black box).  A net touching node blocks ``b1 < b2 < ...``
        contributes the path ``b1-b2-...``.  Output pins mark their block,
        input pins make it an input.
        """
        from vlsidec.grid_circuit import NODE_KINDS, E, S

        node = np.isin(circuit.kind, [int(k) for k in NODE_KINDS])
        H, W = node.shape
        if not node.any():
            return cls.build(0, ())
        # Union-find over node cells joined by a wireless shared edge.
        ids = -np.ones((H, W), np.int64)
        ids[node] = np.arange(int(node.sum()))
        parent = list(range(int(node.sum())))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        horiz = node[:, :-1] & node[:, 1:] & ~(circuit.wires[:, :-1, E] > 0)
        vert = node[:-1, :] & node[1:, :] & ~(circuit.wires[:-1, :, S] > 0)
        for y, x in zip(*np.nonzero(horiz)):
            a, b = find(ids[y, x]), find(ids[y, x + 1])
            if a != b:
                parent[max(a, b)] = min(a, b)
        for y, x in zip(*np.nonzero(vert)):
            a, b = find(ids[y, x]), find(ids[y + 1, x])
            if a != b:
                parent[max(a, b)] = min(a, b)
        roots = np.array([find(i) for i in range(len(parent))])
        _, block_of_cell_id = np.unique(roots, return_inverse=True)
        block = -np.ones((H, W), np.int64)
        block[node] = block_of_cell_id
        n_blocks = int(block_of_cell_id.max()) + 1

        touched: dict[int, set[int]] = {}
        for arr, dy, dx in ((circuit.h_net, 0, 1), (circuit.v_net, 1, 0)):
            ys, xs = np.nonzero(arr >= 0)
            for y, x in zip(ys, xs):
                net = int(arr[y, x])
                for cy, cx in ((y, x), (y + dy, x + dx)):
                    if block[cy, cx] >= 0:
                        touched.setdefault(net, set()).add(int(block[cy, cx]))
        edges = []
        for net in sorted(touched):
            blocks = sorted(touched[net])
            edges.extend(zip(blocks, blocks[1:]))
        marked = {int(block[y, x]) for x, y in circuit.output_pins if block[y, x] >= 0}
        inputs = {int(block[y, x]) for x, y in circuit.input_pins if block[y, x] >= 0}
        return cls.build(n_blocks, edges, marked=marked, inputs=inputs)

    def adjacency(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [dict() for _ in range(self.n_vertices)]
        for u, v, m in self.edges:
            adj[u][v] = adj[u].get(v, 0) + m
            adj[v][u] = adj[v].get(u, 0) + m
        return adj


@dataclass(frozen=True)
class Bisection:
    sides: tuple[frozenset[int], frozenset[int]]
    cut_edges: tuple[tuple[int, int, int], ...]

    @property
    def width(self) -> int:
        return sum(m for _, _, m in self.cut_edges)


@dataclass(frozen=True)
class Leaf:
    vertices: frozenset[int]
    f: int
    n_inputs: int
    k_outputs: int


@dataclass(frozen=True)
class BisectionTree:
    r: int
    tau: float
    leaves: tuple[Leaf, ...]
    cut_edges: tuple[tuple[int, int, int, int], ...]  # (u, v, multiplicity, stage)
    balanced: bool = True

    def b(self, i: int) -> float:
        return self.tau * self.leaves[i].f

    @property
    def B_r(self) -> float:
        return self.tau * sum(leaf.f for leaf in self.leaves)


@dataclass(frozen=True)
class BitsSummary:
    B_r: float
    min_b: float
    n_per_leaf: tuple[int, ...]
    n_histogram: dict[int, int]


# -- the two bisection engines -------------------------------------------------


def _local(graph: CircuitGraph, vertices: Sequence[int]):
    pos = {v: i for i, v in enumerate(vertices)}
    full = graph.adjacency()
    adj = [[(pos[u], m) for u, m in sorted(full[v].items()) if u in pos] for v in vertices]
    marked = [v in graph.marked for v in vertices]
    return adj, marked


def _exact_search(adj: list[list[tuple[int, int]]], marked: list[bool]) -> list[int]:
    """Branch and bound in vertex order, side 0 first.

    Vertex 0 is pinned to side 0 (side-swap symmetry).  Because leaves are
    visited in lexicographic order and only strict improvements are kept,
    the returned assignment is the lexicographically smallest optimum.
    """
    m = len(adj)
    rem_marked = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        rem_marked[i] = rem_marked[i + 1] + marked[i]
    side = [-1] * m
    to = [[0] * m, [0] * m]
    best_cost = [sum(w for row in adj for _, w in row) // 2 + 1]
    best_side: list[list[int]] = [[]]
    state = {"cut": 0, "lb": 0, "diff": 0}

    def assign(v: int, s: int) -> tuple[int, int]:
        d_cut = to[1 - s][v]
        d_lb = -min(to[0][v], to[1][v])
        side[v] = s
        for u, w in adj[v]:
            if side[u] < 0:
                old = min(to[0][u], to[1][u])
                to[s][u] += w
                d_lb += min(to[0][u], to[1][u]) - old
        return d_cut, d_lb

    def unassign(v: int, s: int) -> None:
        for u, w in adj[v]:
            if side[u] < 0:
                to[s][u] -= w
        side[v] = -1

    def dfs(i: int) -> None:
        if i == m:
            if state["cut"] < best_cost[0]:
                best_cost[0] = state["cut"]
                best_side[0] = side.copy()
            return
        for s in ((0,) if i == 0 else (0, 1)):
            diff = state["diff"] + ((1 if s == 0 else -1) if marked[i] else 0)
            r = rem_marked[i + 1]
            if diff - r > 1 or diff + r < -1:
                continue
            d_cut, d_lb = assign(i, s)
            state["cut"] += d_cut
            state["lb"] += d_lb
            prev_diff = state["diff"]
            state["diff"] = diff
            if state["cut"] + state["lb"] < best_cost[0]:
                dfs(i + 1)
            state["diff"] = prev_diff
            state["cut"] -= d_cut
            state["lb"] -= d_lb
            unassign(i, s)

    dfs(0)
    if not best_side[0]:
        raise BisectionError("no balanced split exists")
    return best_side[0]


def _cut_weight(adj, side) -> int:
    return sum(w for v, row in enumerate(adj) for u, w in row if u > v and side[u] != side[v])


def _fm_pass(adj, marked, side, limit: int) -> bool:
    """One Fiduccia-Mattheyses pass; returns True if the cut strictly improved."""
    m = len(adj)
    gain = [0] * m
    for v in range(m):
        for u, w in adj[v]:
            gain[v] += w if side[u] != side[v] else -w
    diff = sum((1 if side[v] == 0 else -1) for v in range(m) if marked[v])
    locked = [False] * m
    moves: list[int] = []
    cum = best_cum = 0
    best_len = 0
    for _ in range(m):
        pick = -1
        for v in range(m):
            if locked[v]:
                continue
            if marked[v]:
                nd = diff + (-2 if side[v] == 0 else 2)
                if abs(nd) > limit:
                    continue
            if pick < 0 or gain[v] > gain[pick]:
                pick = v
        if pick < 0:
            break
        v = pick
        cum += gain[v]
        if marked[v]:
            diff += -2 if side[v] == 0 else 2
        old = side[v]
        side[v] = 1 - old
        locked[v] = True
        gain[v] = -gain[v]
        for u, w in adj[v]:
            # u's edge to v flipped between internal and external
            gain[u] += -2 * w if side[u] == side[v] else 2 * w
        moves.append(v)
        if abs(diff) <= 1 and cum > best_cum:
            best_cum, best_len = cum, len(moves)
    for v in moves[best_len:]:
        side[v] = 1 - side[v]
    return best_cum > 0


def _normalise(side: list[int]) -> list[int]:
    return side if not side or side[0] == 0 else [1 - s for s in side]


def _heuristic_search(adj, marked, rng: np.random.Generator, restarts: int, max_passes: int = 32) -> list[int]:
    m = len(adj)
    marked_idx = [v for v in range(m) if marked[v]]
    best: tuple[int, list[int]] | None = None
    for _ in range(max(1, restarts)):
        side = [int(b) for b in rng.integers(0, 2, size=m)]
        order = list(rng.permutation(marked_idx)) if marked_idx else []
        first = int(rng.integers(0, 2)) if len(order) % 2 else 0
        half = (len(order) + first) // 2
        for j, v in enumerate(order):
            side[int(v)] = 0 if j < half else 1
        limit = 2 if len(marked_idx) >= 2 else 1
        for _ in range(max_passes):
            if not _fm_pass(adj, marked, side, limit):
                break
        side = _normalise(side)
        key = (_cut_weight(adj, side), side)
        if best is None or key < best:
            best = key
    assert best is not None
    return best[1]


def _split(graph: CircuitGraph, vertices: Sequence[int], mode: str, rng, restarts: int, budget: int) -> Bisection:
    vertices = sorted(vertices)
    n_marked = sum(v in graph.marked for v in vertices)
    if n_marked < 2:
        raise BisectionError(f"need at least 2 marked vertices to bisect, have {n_marked}")
    adj, marked = _local(graph, vertices)
    if mode == "exact":
        if len(vertices) > budget:
            raise BisectionError(
                f"exact bisection refused: {len(vertices)} vertices exceed the budget of {budget}; "
                "use the heuristic mode"
            )
        side = _exact_search(adj, marked)
    elif mode == "heuristic":
        side = _heuristic_search(adj, marked, rng, restarts)
    else:
        raise ValueError(f"unknown bisection mode {mode!r}")
    s0 = frozenset(v for v, s in zip(vertices, side) if s == 0)
    s1 = frozenset(v for v, s in zip(vertices, side) if s == 1)
    cut = tuple(
        (vertices[a], vertices[b], w) for a, row in enumerate(adj) for b, w in row if b > a and side[a] != side[b]
    )
    return Bisection((s0, s1), tuple(sorted(cut)))


def min_bisect_exact(graph: CircuitGraph, budget: int = EXACT_BUDGET) -> Bisection:
    """Globally minimum bisection of ``graph.marked`` (exhaustive, pruned)."""
    return _split(graph, range(graph.n_vertices), "exact", None, 0, budget)


def min_bisect_heuristic(graph: CircuitGraph, restarts: int = 32, seed: int = 0) -> Bisection:
    """Multi-start Fiduccia-Mattheyses bisection; deterministic for a given seed."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return _split(graph, range(graph.n_vertices), "heuristic", rng, restarts, EXACT_BUDGET)


def max_stages(graph: CircuitGraph) -> int:
    k = len(graph.marked)
    return int(math.floor(math.log2(k))) if k >= 1 else 0


def nested_bisect(
    graph: CircuitGraph,
    r: int,
    tau: float,
    mode: str = "heuristic",
    seed: int = 0,
    restarts: int = 32,
    budget: int = EXACT_BUDGET,
) -> BisectionTree:
    """Apply ``r`` rounds of minimum bisection to the marked set.

    Leaves come out in depth-first order with side 0 first.
    """
    if r < 1:
        raise BisectionError("r must be at least 1")
    if tau < 0:
        raise BisectionError("tau must be non-negative")
    r_max = max_stages(graph)
    if 2**r > len(graph.marked):
        raise BisectionError(f"r = {r} needs {2**r} marked vertices, have {len(graph.marked)}; maximal feasible r is {r_max}")

    cuts: list[tuple[int, int, int, int]] = []
    leaves_v: list[frozenset[int]] = []

    def recurse(vertices: frozenset[int], stage: int, path: tuple[int, ...]) -> None:
        if stage == r:
            leaves_v.append(vertices)
            return
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=path)))
        bis = _split(graph, vertices, mode, rng, restarts, budget)
        cuts.extend((u, v, m, stage + 1) for u, v, m in bis.cut_edges)
        recurse(bis.sides[0], stage + 1, path + (0,))
        recurse(bis.sides[1], stage + 1, path + (1,))

    recurse(frozenset(range(graph.n_vertices)), 0, (1,))

    leaf_of = {}
    for i, vs in enumerate(leaves_v):
        for v in vs:
            leaf_of[v] = i
    f = [0] * len(leaves_v)
    for u, v, m, _ in cuts:
        f[leaf_of[u]] += m
        f[leaf_of[v]] += m
    leaves = tuple(
        Leaf(vs, f[i], sum(v in graph.inputs for v in vs), sum(v in graph.marked for v in vs))
        for i, vs in enumerate(leaves_v)
    )
    return BisectionTree(r=r, tau=tau, leaves=leaves, cut_edges=tuple(cuts))


def bits_summary(tree: BisectionTree) -> BitsSummary:
    n_per_leaf = tuple(leaf.n_inputs for leaf in tree.leaves)
    return BitsSummary(
        B_r=tree.B_r,
        min_b=min(tree.b(i) for i in range(len(tree.leaves))),
        n_per_leaf=n_per_leaf,
        n_histogram=dict(sorted(Counter(n_per_leaf).items())),
    )


# -- file formats ----------------------------------------------------------------


def dumps_graph(graph: CircuitGraph) -> str:
    doc = textio.Document(
        header={"format": "circuit_graph", "n_vertices": str(graph.n_vertices)},
        sections={
            "edges": [[str(u), str(v), str(m)] for u, v, m in graph.edges],
            "marked": [[str(v)] for v in sorted(graph.marked)],
            "inputs": [[str(v)] for v in sorted(graph.inputs)],
        },
    )
    return textio.dump(doc)


def loads_graph(text: str) -> CircuitGraph:
    """Read a bisection graph.  A Tanner graph file is accepted too."""
    doc = textio.parse(text)
    try:
        if doc.get("format") == "tanner" or "n_var" in doc.header:
            from vlsidec import tanner_layout

            return CircuitGraph.from_tanner(tanner_layout.loads(text))
        n = int(doc.require("n_vertices"))
        flat = lambda rows: [int(t) for row in rows for t in row]  # noqa: E731
        marked = flat(doc.rows("marked")) if "marked" in doc.sections else None
        return CircuitGraph.build(n, [[int(t) for t in row] for row in doc.rows("edges")], marked, flat(doc.rows("inputs")))
    except ValueError as exc:
        raise textio.FormatError(str(exc)) from exc


def dumps_tree(tree: BisectionTree, mode: str = "") -> str:
    header = {"format": "bisection_tree", "r": str(tree.r), "tau": repr(float(tree.tau)), "B_r": repr(float(tree.B_r))}
    if mode:
        header["mode"] = mode
    doc = textio.Document(
        header=header,
        sections={
            "leaves": [
                [str(i), str(leaf.f), str(leaf.n_inputs), str(leaf.k_outputs), repr(float(tree.b(i)))]
                for i, leaf in enumerate(tree.leaves)
            ],
            "cuts": [[str(u), str(v), str(m), str(s)] for u, v, m, s in tree.cut_edges],
        },
    )
    return "# leaf_id f_i n_i k_i b_i\n" + textio.dump(doc)
