"""Shared fixtures and circuit mutators for the test suite."""

from __future__ import annotations

import numpy as np

from vlsidec import grid_circuit as gc
from vlsidec.grid_circuit import E, N, S, W, Cell, GridCircuit, Kind
from vlsidec.tanner_layout import TannerGraph, layout

# acceptance results, criterion number -> (passed, detail); printed by conftest
CRITERIA: dict[int, tuple[bool, str]] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    CRITERIA[num] = (bool(ok), detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    return bool(ok)


def small_circuit() -> GridCircuit:
    """Hand-drawn 6x4 circuit: inputs A, B, output O, one crossing, 11 occupied cells.

        y=0   . . B . . .
        y=1   A - + - L .
        y=2   . . | . | .
        y=3   . . G - O .
    """
    cells = {
        (0, 1): Cell("io_pin", ("E",), "input", 0),
        (1, 1): Cell("empty", ("E", "W")),
        (2, 1): Cell("crossing", ("N", "E", "S", "W")),
        (3, 1): Cell("empty", ("E", "W")),
        (4, 1): Cell("logic", ("W", "S")),
        (2, 0): Cell("io_pin", ("S",), "input", 1),
        (2, 2): Cell("empty", ("N", "S")),
        (2, 3): Cell("logic", ("N", "E")),
        (4, 2): Cell("empty", ("N", "S")),
        (4, 3): Cell("io_pin", ("N", "W"), "output", 2),
        (3, 3): Cell("empty", ("E", "W")),
    }
    nets = [
        [((0, 1), (1, 1)), ((1, 1), (2, 1)), ((2, 1), (3, 1)), ((3, 1), (4, 1))],
        [((2, 0), (2, 1)), ((2, 1), (2, 2)), ((2, 2), (2, 3))],
        [((4, 1), (4, 2)), ((4, 2), (4, 3))],
        [((2, 3), (3, 3)), ((3, 3), (4, 3))],
    ]
    return GridCircuit.from_cells(6, 4, cells, nets, input_pins=[(0, 1), (2, 0)], output_pins=[(4, 3)])


def six_cycle() -> TannerGraph:
    """Three variables and three checks joined in a single 6-cycle."""
    return TannerGraph(3, 3, ((0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)))


def mesh_edges(side: int) -> list[tuple[int, int]]:
    idx = lambda x, y: y * side + x  # noqa: E731
    h = [(idx(x, y), idx(x + 1, y)) for y in range(side) for x in range(side - 1)]
    v = [(idx(x, y), idx(x, y + 1)) for y in range(side - 1) for x in range(side)]
    return h + v


def random_tanner(rng: np.random.Generator, max_var: int = 8) -> TannerGraph:
    """Small irregular Tanner graph, every node of degree at least 2."""
    while True:
        n_var = int(rng.integers(3, max_var + 1))
        n_chk = int(rng.integers(2, max(3, n_var // 2 + 2)))
        edges = set()
        for v in range(n_var):
            for c in rng.choice(n_chk, size=min(n_chk, int(rng.integers(2, 4))), replace=False):
                edges.add((v, int(c)))
        g = TannerGraph(n_var, n_chk, tuple(sorted(edges)))
        if min(g.chk_degrees) >= 2:
            return g


# -- single-axiom mutations ---------------------------------------------------------


def _straight_h(c: GridCircuit) -> np.ndarray:
    return (c.kind == Kind.EMPTY) & (c.wires == np.array([0, 1, 0, 1], np.uint8)).all(axis=2)


def _free(c: GridCircuit) -> np.ndarray:
    return ~c.occupied_mask


def _pick(rng, mask: np.ndarray) -> tuple[int, int]:
    ys, xs = np.nonzero(mask)
    if not len(ys):
        raise LookupError("no site for mutation")
    i = int(rng.integers(len(ys)))
    return int(xs[i]), int(ys[i])


def _free_pair_h(c: GridCircuit) -> np.ndarray:
    free = _free(c)
    m = np.zeros_like(free)
    m[:, :-1] = free[:, :-1] & free[:, 1:]
    h_free = c.h_net < 0
    m[:, :-1] &= h_free
    return m


def _box_pair(c: GridCircuit) -> np.ndarray:
    logic = c.kind == Kind.LOGIC
    m = np.zeros_like(logic)
    m[:, :-1] = logic[:, :-1] & logic[:, 1:] & ~(c.wires[:, :-1, E] > 0)
    ok = (c.wires.sum(axis=2) <= 3)
    m[:, :-1] &= ok[:, :-1] & ok[:, 1:]
    return m


def mutate(c: GridCircuit, cls: str, rng: np.random.Generator) -> GridCircuit:
    """Inject exactly one violation of class ``cls`` into a valid circuit."""
    b = c.thaw()
    if cls in (gc.DEGREE, gc.DUPLICATE_EDGE, gc.BAD_CROSSING):
        x, y = _pick(rng, _straight_h(c))
        if cls == gc.DEGREE:
            b.wires[y, x] = [0, 3, 0, 2]
        elif cls == gc.DUPLICATE_EDGE:
            b.wires[y, x] = [0, 2, 0, 1]
        else:
            b.kind[y, x] = Kind.CROSSING
    elif cls == gc.BARE_WIRE:
        x, y = _pick(rng, c.kind == Kind.CROSSING)
        b.kind[y, x] = Kind.EMPTY
    elif cls == gc.OFF_GRID:
        free = _free(c)
        border = np.zeros_like(free)
        border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
        x, y = _pick(rng, free & border)
        d = N if y == 0 else S if y == c.height - 1 else W if x == 0 else E
        b.wires[y, x, d] = 1
    elif cls == gc.EDGE_MISMATCH:
        x, y = _pick(rng, _free_pair_h(c))
        b.wires[y, x, E] = 1
    elif cls == gc.NET_EDGE:
        x, y = _pick(rng, _free_pair_h(c))
        b.h_net[y, x] = int(rng.integers(0, max(1, len(c.nets))))
    elif cls == gc.NET_DISCONNECTED:
        x, y = _pick(rng, _box_pair(c))
        net = int(rng.integers(0, len(c.nets)))
        b.wires[y, x, E] += 1
        b.wires[y, x + 1, W] += 1
        b.h_net[y, x] = net
    elif cls == gc.NET_ENDPOINT:
        x, y = _pick(rng, _free_pair_h(c))
        b.wires[y, x, E] += 1
        b.wires[y, x + 1, W] += 1
        b.h_net[y, x] = max(c.nets, default=-1) + 1
    elif cls == gc.PIN_LIST:
        i = int(rng.integers(len(b.input_pins)))
        del b.input_pins[i]
    elif cls == gc.PIN_INDEX:
        x, y = _pick(rng, c.kind == Kind.IO_PIN)
        b.pin_index[y, x] = int((c.kind == Kind.IO_PIN).sum()) + int(rng.integers(0, 5))
    else:
        raise ValueError(cls)
    return b.freeze()


def mutation_base(rng: np.random.Generator) -> GridCircuit:
    """Random small Tanner layout that offers a site for every mutation."""
    while True:
        c = layout(random_tanner(rng))
        try:
            for cls in gc.VIOLATION_CLASSES:
                mutate(c, cls, np.random.default_rng(0))
        except LookupError:
            continue
        return c
