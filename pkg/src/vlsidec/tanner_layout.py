"""Place-and-route of a Tanner graph onto a grid circuit.

Variable-node black boxes are stacked in a left band and check-node boxes in
a right band, separated by one private routing column per edge.  Every box
port owns a private row: variable ports take rows ``0 .. |E|-1`` and check
ports rows ``|E| .. 2|E|-1``.  Each edge is routed as

    variable port --row--> its column --column--> check row --row--> check port

so two wires can meet only where a row run crosses a column run, which
becomes a crossing cell.  All wire cells lie inside the ``|E| x 2|E|``
routing region, hence ``wire_area <= 2|E|^2``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from vlsidec import grid_circuit as gc
from vlsidec import textio
from vlsidec.grid_circuit import CircuitBuilder, GridCircuit, Kind, PinRole, TechParams


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite multigraph of ``n_var`` variable and ``n_chk`` check nodes."""

    n_var: int
    n_chk: int
    edges: tuple[tuple[int, int], ...] = ()
    d_v: int | None = None
    d_c: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(v), int(c)) for v, c in self.edges))
        if self.n_var < 0 or self.n_chk < 0:
            raise ValueError("node counts must be non-negative")
        for v, c in self.edges:
            if not (0 <= v < self.n_var and 0 <= c < self.n_chk):
                raise ValueError(f"edge ({v}, {c}) out of range for {self.n_var} variables, {self.n_chk} checks")
        if self.d_v is not None and any(d != self.d_v for d in self.var_degrees):
            raise ValueError(f"variable degrees {sorted(set(self.var_degrees))} do not match declared d_v={self.d_v}")
        if self.d_c is not None and any(d != self.d_c for d in self.chk_degrees):
            raise ValueError(f"check degrees {sorted(set(self.chk_degrees))} do not match declared d_c={self.d_c}")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def var_degrees(self) -> list[int]:
        deg = [0] * self.n_var
        for v, _ in self.edges:
            deg[v] += 1
        return deg

    @property
    def chk_degrees(self) -> list[int]:
        deg = [0] * self.n_chk
        for _, c in self.edges:
            deg[c] += 1
        return deg

    @property
    def k(self) -> int:
        """Design dimension ``n - (n - k)``, i.e. variables minus checks (floored at 0)."""
        return max(self.n_var - self.n_chk, 0)


@dataclass(frozen=True)
class NodeAreaModel:
    """Cell count of a black box as a function of its degree (default ``d^2``)."""

    area_of: Callable[[int], int] = field(default=lambda d: d * d)

    def box_shape(self, degree: int) -> tuple[int, int]:
        """``(rows, cols)`` of the box; rows equal the port count."""
        if degree == 0:
            return (0, 0)
        cells = int(self.area_of(degree))
        return (degree, max(1, math.ceil(cells / degree)))


@dataclass(frozen=True)
class AreaReport:
    wire_area: float
    node_area: float
    total: float


def _outward(shapes, shift: int) -> np.ndarray:
    """Column shift per box: every second placed box moves out by ``shift``."""
    placed = np.cumsum([h > 0 for h, _ in shapes]) if shapes else np.empty(0, int)
    return np.where(placed % 2 == 0, shift, 0)


def _port_rows(graph: TannerGraph):
    """Row of each edge at its variable port and at its check port."""
    E = graph.n_edges
    var_off = np.concatenate([[0], np.cumsum(graph.var_degrees)])[:-1] if graph.n_var else np.empty(0, int)
    chk_off = np.concatenate([[0], np.cumsum(graph.chk_degrees)])[:-1] if graph.n_chk else np.empty(0, int)
    seen_v = [0] * graph.n_var
    seen_c = [0] * graph.n_chk
    vrow = np.empty(E, np.int64)
    crow = np.empty(E, np.int64)
    for i, (v, c) in enumerate(graph.edges):
        vrow[i] = var_off[v] + seen_v[v]
        crow[i] = E + chk_off[c] + seen_c[c]
        seen_v[v] += 1
        seen_c[c] += 1
    return var_off, chk_off, vrow, crow


def layout(graph: TannerGraph, model: NodeAreaModel = NodeAreaModel()) -> GridCircuit:
    """Draw ``graph`` as a grid circuit.

    Variable node ``v`` becomes an I/O pin (input, and also output for the
    first ``k`` variables) sitting in the outer corner of its box.  Boxes
    are stacked in two bands; every other box in a band is pushed one box
    width outward so that neighbouring boxes never share an edge (skipped
    for graphs of two edges or fewer).
    """
    E = graph.n_edges
    vdeg, cdeg = graph.var_degrees, graph.chk_degrees
    vshape = [model.box_shape(d) for d in vdeg]
    cshape = [model.box_shape(d) for d in cdeg]
    # with two edges or fewer the extra columns would break the 2|E|^2 wire budget
    spread = 2 if E > 2 else 1
    left = spread * max((w for _, w in vshape), default=0)
    right = spread * max((w for _, w in cshape), default=0)
    v_out = _outward(vshape, left // 2 if E > 2 else 0)
    c_out = _outward(cshape, right // 2 if E > 2 else 0)
    x_route = left
    x_chk = left + E
    width = left + E + right
    height = 2 * E
    b = CircuitBuilder(width, height)

    var_off, chk_off, vrow, crow = _port_rows(graph)
    pin_idx = 0
    for v, (h, w) in enumerate(vshape):
        if h == 0:
            continue
        y0 = int(var_off[v])
        x1 = left - int(v_out[v])
        b.kind[y0 : y0 + h, x1 - w : x1] = Kind.LOGIC
        px, py = x1 - w, y0
        b.kind[py, px] = Kind.IO_PIN
        role = PinRole.BOTH if v < graph.k else PinRole.INPUT
        b.pin_role[py, px] = role
        b.pin_index[py, px] = pin_idx
        pin_idx += 1
        b.input_pins.append((px, py))
        if role == PinRole.BOTH:
            b.output_pins.append((px, py))
    for c, (h, w) in enumerate(cshape):
        if h == 0:
            continue
        y0 = E + int(chk_off[c])
        x0 = x_chk + int(c_out[c])
        b.kind[y0 : y0 + h, x0 : x0 + w] = Kind.LOGIC

    for i in range(E):
        col = x_route + i
        yv, yc = int(vrow[i]), int(crow[i])
        v, c = graph.edges[i]
        b.hwire(yv, left - 1 - int(v_out[v]), col, net=i)
        b.vwire(col, yv, yc, net=i)
        b.hwire(yc, col, x_chk + int(c_out[c]), net=i)

    cross = (b.kind == Kind.EMPTY) & (b.wires == 1).all(axis=2)
    b.kind[cross] = Kind.CROSSING
    return b.freeze()


def area_report(circuit: GridCircuit, graph: TannerGraph, tech: TechParams = TechParams()) -> AreaReport:
    """Split the wired area of a layout into wire cells and black-box cells."""
    del graph  # the split is read off the circuit itself
    occupied = circuit.occupied_mask
    node = np.isin(circuit.kind, [int(k) for k in gc.NODE_KINDS])
    node_cells = int((occupied & node).sum())
    wire_cells = int((occupied & ~node).sum())
    scale = tech.lam**2
    return AreaReport(wire_cells * scale, node_cells * scale, (wire_cells + node_cells) * scale)


def area_bound(graph: TannerGraph, tech: TechParams = TechParams()) -> AreaReport:
    """Analytic ceiling ``2|E|^2 + sum d_v^2 + sum d_c^2``, in ``lambda^2`` units."""
    wire = 2 * graph.n_edges**2
    node = sum(d * d for d in graph.var_degrees) + sum(d * d for d in graph.chk_degrees)
    s = tech.lam**2
    return AreaReport(wire * s, node * s, (wire + node) * s)


def energy_upper(
    graph: TannerGraph,
    iterations: float,
    tech: TechParams = TechParams(),
    circuit: GridCircuit | None = None,
) -> float:
    """Decoding energy ``xi * A * 2N`` for ``N`` message-passing iterations.

    Uses the measured area of ``circuit`` when given, else the analytic bound.
    """
    if iterations < 0:
        raise ValueError(f"iterations must be non-negative, got {iterations}")
    if circuit is not None:
        return gc.energy(circuit, 2 * iterations, tech)
    return tech.xi * area_bound(graph, tech).total * (2 * iterations)


def loglog_iterations(n: int) -> int:
    """``ceil(log2 log2 n)``: the iteration count of a doubly-logarithmic schedule."""
    if n < 4:
        return 1
    return math.ceil(math.log2(math.log2(n)))


# -- file format --------------------------------------------------------------


def dumps(graph: TannerGraph) -> str:
    header = {"format": "tanner", "n_var": str(graph.n_var), "n_chk": str(graph.n_chk)}
    if graph.d_v is not None:
        header["d_v"] = str(graph.d_v)
    if graph.d_c is not None:
        header["d_c"] = str(graph.d_c)
    doc = textio.Document(header=header, sections={"edges": [[str(v), str(c)] for v, c in graph.edges]})
    return textio.dump(doc)


def loads(text: str) -> TannerGraph:
    doc = textio.parse(text)
    try:
        d_v, d_c = doc.get("d_v"), doc.get("d_c")
        return TannerGraph(
            n_var=int(doc.require("n_var")),
            n_chk=int(doc.require("n_chk")),
            edges=tuple((int(v), int(c)) for v, c in doc.rows("edges")),
            d_v=None if d_v is None else int(d_v),
            d_c=None if d_c is None else int(d_c),
        )
    except ValueError as exc:
        raise textio.FormatError(str(exc)) from exc

