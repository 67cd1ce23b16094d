"""Grid circuits obeying Thompson's VLSI axioms, plus area/energy accounting.

A circuit is a dense ``height x width`` grid of cells.  Each cell has a kind
(empty, logic, wire connection, crossing or I/O pin) and a multiset of wire
segments leaving it towards its N/E/S/W neighbours.  Wire nets are stored as
integer labels on the grid edges between adjacent cells (``-1`` = unlabeled).

Coordinates are ``(x, y)`` with ``x`` the column and ``y`` the row counted
from the top, so ``N`` points to ``y - 1``.  Geometry is normalised to one
grid unit; :class:`TechParams` scales areas and energies on report.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from vlsidec import textio

FORMAT_VERSION = 1
MAX_CELLS = 10**8

DIRS = "NESW"
N, E, S, W = range(4)
_DX = (0, 1, 0, -1)
_DY = (-1, 0, 1, 0)


class Kind(IntEnum):
    EMPTY = 0
    LOGIC = 1
    WIRE_CONNECTION = 2
    CROSSING = 3
    IO_PIN = 4


class PinRole(IntEnum):
    NONE = 0
    INPUT = 1
    OUTPUT = 2
    BOTH = 3


_KIND_NAMES = {k: k.name.lower() for k in Kind}
_KIND_BY_NAME = {v: k for k, v in _KIND_NAMES.items()}
_ROLE_NAMES = {PinRole.INPUT: "input", PinRole.OUTPUT: "output", PinRole.BOTH: "both"}
_ROLE_BY_NAME = {v: k for k, v in _ROLE_NAMES.items()}
NODE_KINDS = (Kind.LOGIC, Kind.WIRE_CONNECTION, Kind.IO_PIN)

# Violation classes reported by validate().
DEGREE = "degree"
DUPLICATE_EDGE = "duplicate_edge"
BAD_CROSSING = "bad_crossing"
BARE_WIRE = "bare_wire"
OFF_GRID = "off_grid"
EDGE_MISMATCH = "edge_mismatch"
NET_EDGE = "net_edge"
NET_DISCONNECTED = "net_disconnected"
NET_ENDPOINT = "net_endpoint"
PIN_LIST = "pin_list"
PIN_INDEX = "pin_index"
VIOLATION_CLASSES = (
    DEGREE,
    DUPLICATE_EDGE,
    BAD_CROSSING,
    BARE_WIRE,
    OFF_GRID,
    EDGE_MISMATCH,
    NET_EDGE,
    NET_DISCONNECTED,
    NET_ENDPOINT,
    PIN_LIST,
    PIN_INDEX,
)


class InvalidCircuitError(ValueError):
    """An operation that requires a valid circuit was handed an invalid one."""

    def __init__(self, violation: Violation):
        super().__init__(f"invalid circuit: {violation}")
        self.violation = violation


@dataclass(frozen=True)
class Cell:
    """One grid square.

    ``wire_edges`` is a sequence of directions from ``"NESW"``; a repeated
    direction means two wires on the same grid edge (an axiom violation the
    validator reports, so it has to be representable).
    """

    kind: str = "empty"
    wire_edges: tuple[str, ...] = ()
    pin_role: str | None = None
    pin_index: int | None = None

    def __post_init__(self):
        if self.kind not in _KIND_BY_NAME:
            raise ValueError(f"unknown cell kind {self.kind!r}")
        edges = tuple(self.wire_edges)
        if any(d not in DIRS for d in edges):
            raise ValueError(f"wire edges must be drawn from {DIRS!r}, got {edges!r}")
        object.__setattr__(self, "wire_edges", tuple(sorted(edges, key=DIRS.index)))
        if self.pin_role is not None and self.pin_role not in _ROLE_BY_NAME:
            raise ValueError(f"unknown pin role {self.pin_role!r}")


@dataclass(frozen=True)
class TechParams:
    """Technology constants: energy parameter ``xi`` and wire width ``lam``."""

    xi: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise ValueError(f"xi must be positive and finite, got {self.xi}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be positive and finite, got {self.lam}")

    @property
    def k_tech(self) -> float:
        """``xi * lam^2 * (sqrt2 - 1) / (4 sqrt2)``, the constant in the energy lower bounds."""
        return self.xi * self.lam**2 * K_PRIME


K_PRIME = (math.sqrt(2.0) - 1.0) / (4.0 * math.sqrt(2.0))


@dataclass(frozen=True)
class Violation:
    kind: str
    x: int
    y: int
    message: str

    def __str__(self) -> str:
        return f"{self.kind} at ({self.x}, {self.y}): {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def classes(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.valid

    def __len__(self) -> int:
        return len(self.violations)


Edge = tuple[tuple[int, int], tuple[int, int]]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class GridCircuit:
    """Immutable dense grid circuit.

    Arrays (all indexed ``[y, x]``):

    ``kind``       uint8 ``(H, W)`` of :class:`Kind`
    ``wires``      uint8 ``(H, W, 4)`` segment multiplicity per direction NESW
    ``pin_role``   int8 ``(H, W)`` of :class:`PinRole`
    ``pin_index``  int32 ``(H, W)``; ``-1`` where unset
    ``h_net``      int32 ``(H, W-1)`` net label of the edge ``(x,y)-(x+1,y)``
    ``v_net``      int32 ``(H-1, W)`` net label of the edge ``(x,y)-(x,y+1)``
    """

    def __init__(
        self,
        kind: np.ndarray,
        wires: np.ndarray,
        pin_role: np.ndarray,
        pin_index: np.ndarray,
        h_net: np.ndarray,
        v_net: np.ndarray,
        input_pins: Sequence[tuple[int, int]] = (),
        output_pins: Sequence[tuple[int, int]] = (),
    ):
        height, width = kind.shape
        if height * width > MAX_CELLS:
            raise ValueError(f"grid of {height * width} cells exceeds the {MAX_CELLS} cell limit")
        shapes = {
            "wires": (wires.shape, (height, width, 4)),
            "pin_role": (pin_role.shape, (height, width)),
            "pin_index": (pin_index.shape, (height, width)),
            "h_net": (h_net.shape, (height, max(width - 1, 0))),
            "v_net": (v_net.shape, (max(height - 1, 0), width)),
        }
        for name, (got, want) in shapes.items():
            if got != want:
                raise ValueError(f"{name} has shape {got}, expected {want}")
        self.width = width
        self.height = height
        self.kind = _freeze(kind.astype(np.uint8, copy=True))
        self.wires = _freeze(wires.astype(np.uint8, copy=True))
        self.pin_role = _freeze(pin_role.astype(np.int8, copy=True))
        self.pin_index = _freeze(pin_index.astype(np.int32, copy=True))
        self.h_net = _freeze(h_net.astype(np.int32, copy=True))
        self.v_net = _freeze(v_net.astype(np.int32, copy=True))
        self.input_pins = tuple((int(x), int(y)) for x, y in input_pins)
        self.output_pins = tuple((int(x), int(y)) for x, y in output_pins)
        for x, y in self.input_pins + self.output_pins:
            if not (0 <= x < width and 0 <= y < height):
                raise ValueError(f"pin ({x}, {y}) lies outside the {width}x{height} grid")

    # -- construction -------------------------------------------------

    @classmethod
    def empty(cls, width: int, height: int) -> GridCircuit:
        return CircuitBuilder(width, height).freeze()

    @classmethod
    def from_cells(
        cls,
        width: int,
        height: int,
        cells: Mapping[tuple[int, int], Cell],
        nets: Iterable[Iterable[Edge]] = (),
        input_pins: Sequence[tuple[int, int]] = (),
        output_pins: Sequence[tuple[int, int]] = (),
    ) -> GridCircuit:
        b = CircuitBuilder(width, height)
        for (x, y), cell in cells.items():
            b.set_cell(x, y, cell)
        for label, net in enumerate(nets):
            for edge in net:
                b.label_edge(edge, label)
        b.input_pins = list(input_pins)
        b.output_pins = list(output_pins)
        return b.freeze()

    def thaw(self) -> CircuitBuilder:
        b = CircuitBuilder(self.width, self.height)
        b.kind[...] = self.kind
        b.wires[...] = self.wires
        b.pin_role[...] = self.pin_role
        b.pin_index[...] = self.pin_index
        b.h_net[...] = self.h_net
        b.v_net[...] = self.v_net
        b.input_pins = list(self.input_pins)
        b.output_pins = list(self.output_pins)
        return b

    # -- views ---------------------------------------------------------

    def cell(self, x: int, y: int) -> Cell:
        counts = self.wires[y, x]
        edges = tuple(d for d, c in zip(DIRS, counts) for _ in range(int(c)))
        role = PinRole(int(self.pin_role[y, x]))
        idx = int(self.pin_index[y, x])
        return Cell(
            kind=_KIND_NAMES[Kind(int(self.kind[y, x]))],
            wire_edges=edges,
            pin_role=_ROLE_NAMES.get(role),
            pin_index=None if idx < 0 else idx,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @cached_property
    def occupied_mask(self) -> np.ndarray:
        return _freeze((self.kind != Kind.EMPTY) | (self.wires.sum(axis=2) > 0))

    @property
    def occupied_count(self) -> int:
        return int(self.occupied_mask.sum())

    @cached_property
    def nets(self) -> dict[int, list[Edge]]:
        """Net label -> list of grid edges carrying it, in row-major order."""
        out: dict[int, list[Edge]] = {}
        for y, x in zip(*np.nonzero(self.h_net >= 0)):
            out.setdefault(int(self.h_net[y, x]), []).append(((int(x), int(y)), (int(x) + 1, int(y))))
        for y, x in zip(*np.nonzero(self.v_net >= 0)):
            out.setdefault(int(self.v_net[y, x]), []).append(((int(x), int(y)), (int(x), int(y) + 1)))
        return dict(sorted(out.items()))

    @cached_property
    def report(self) -> ValidationReport:
        return _validate(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridCircuit):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.input_pins == other.input_pins
            and self.output_pins == other.output_pins
            and all(
                np.array_equal(getattr(self, a), getattr(other, a))
                for a in ("kind", "wires", "pin_role", "pin_index", "h_net", "v_net")
            )
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"GridCircuit({self.width}x{self.height}, occupied={self.occupied_count}, nets={len(self.nets)})"

    # -- geometric transforms -------------------------------------------

    def rotate90(self) -> GridCircuit:
        """Rotate a quarter turn clockwise; ``(x, y) -> (H-1-y, x)``."""
        H = self.height

        def rot(a):
            return np.rot90(a, k=-1)

        def mv(p):
            return (H - 1 - p[1], p[0])

        return GridCircuit(
            kind=rot(self.kind),
            wires=np.roll(rot(self.wires), 1, axis=2),
            pin_role=rot(self.pin_role),
            pin_index=rot(self.pin_index),
            h_net=self.v_net.T[:, ::-1],
            v_net=self.h_net.T[:, ::-1],
            input_pins=[mv(p) for p in self.input_pins],
            output_pins=[mv(p) for p in self.output_pins],
        )

    def padded(self, left: int = 0, top: int = 0, right: int = 0, bottom: int = 0) -> GridCircuit:
        """Embed the circuit in a larger grid of empty cells (a translation)."""
        if min(left, top, right, bottom) < 0:
            raise ValueError("padding must be non-negative")
        b = CircuitBuilder(self.width + left + right, self.height + top + bottom)
        ys = slice(top, top + self.height)
        xs = slice(left, left + self.width)
        b.kind[ys, xs] = self.kind
        b.wires[ys, xs] = self.wires
        b.pin_role[ys, xs] = self.pin_role
        b.pin_index[ys, xs] = self.pin_index
        b.h_net[ys, left : left + max(self.width - 1, 0)] = self.h_net
        b.v_net[top : top + max(self.height - 1, 0), xs] = self.v_net
        b.input_pins = [(x + left, y + top) for x, y in self.input_pins]
        b.output_pins = [(x + left, y + top) for x, y in self.output_pins]
        return b.freeze()


@dataclass
class CircuitBuilder:
    """Mutable scratch space used to assemble a :class:`GridCircuit`."""

    width: int
    height: int
    kind: np.ndarray = field(init=False)
    wires: np.ndarray = field(init=False)
    pin_role: np.ndarray = field(init=False)
    pin_index: np.ndarray = field(init=False)
    h_net: np.ndarray = field(init=False)
    v_net: np.ndarray = field(init=False)
    input_pins: list[tuple[int, int]] = field(default_factory=list)
    output_pins: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.width < 0 or self.height < 0:
            raise ValueError("grid dimensions must be non-negative")
        if self.width * self.height > MAX_CELLS:
            raise ValueError(f"grid of {self.width * self.height} cells exceeds the {MAX_CELLS} cell limit")
        H, W = self.height, self.width
        self.kind = np.zeros((H, W), np.uint8)
        self.wires = np.zeros((H, W, 4), np.uint8)
        self.pin_role = np.zeros((H, W), np.int8)
        self.pin_index = np.full((H, W), -1, np.int32)
        self.h_net = np.full((H, max(W - 1, 0)), -1, np.int32)
        self.v_net = np.full((max(H - 1, 0), W), -1, np.int32)

    def set_cell(self, x: int, y: int, cell: Cell) -> None:
        self.kind[y, x] = _KIND_BY_NAME[cell.kind]
        self.wires[y, x] = [cell.wire_edges.count(d) for d in DIRS]
        self.pin_role[y, x] = _ROLE_BY_NAME[cell.pin_role] if cell.pin_role else PinRole.NONE
        self.pin_index[y, x] = -1 if cell.pin_index is None else cell.pin_index

    def label_edge(self, edge: Edge, label: int) -> None:
        (x0, y0), (x1, y1) = sorted(edge)
        if y0 == y1 and x1 == x0 + 1:
            arr, y, x = self.h_net, y0, x0
        elif x0 == x1 and y1 == y0 + 1:
            arr, y, x = self.v_net, y0, x0
        else:
            raise ValueError(f"{edge} does not join two adjacent cells")
        if not (0 <= y < arr.shape[0] and 0 <= x < arr.shape[1]):
            raise ValueError(f"edge {edge} lies outside the grid")
        if arr[y, x] >= 0 and arr[y, x] != label:
            raise ValueError(f"edge {edge} claimed by nets {arr[y, x]} and {label}")
        arr[y, x] = label

    def hwire(self, y: int, x0: int, x1: int, net: int) -> None:
        """Run a horizontal wire along row ``y`` between columns ``x0 < x1``."""
        self.wires[y, x0:x1, E] += 1
        self.wires[y, x0 + 1 : x1 + 1, W] += 1
        self.h_net[y, x0:x1] = net

    def vwire(self, x: int, y0: int, y1: int, net: int) -> None:
        """Run a vertical wire along column ``x`` between rows ``y0 < y1``."""
        self.wires[y0:y1, x, S] += 1
        self.wires[y0 + 1 : y1 + 1, x, N] += 1
        self.v_net[y0:y1, x] = net

    def freeze(self) -> GridCircuit:
        return GridCircuit(
            self.kind,
            self.wires,
            self.pin_role,
            self.pin_index,
            self.h_net,
            self.v_net,
            self.input_pins,
            self.output_pins,
        )


# -- validation -----------------------------------------------------------


def validate(circuit: GridCircuit) -> ValidationReport:
    """Report every axiom violation; an empty report means the circuit is valid."""
    return circuit.report


def _cells(mask: np.ndarray) -> list[tuple[int, int]]:
    ys, xs = np.nonzero(mask)
    return [(int(x), int(y)) for y, x in zip(ys, xs)]


def _validate(c: GridCircuit) -> ValidationReport:
    out: list[Violation] = []
    H, Wd = c.height, c.width
    kind = c.kind
    wires = c.wires
    total = wires.sum(axis=2, dtype=np.int64)
    present = wires > 0
    ndirs = present.sum(axis=2)
    has_dup = (wires > 1).any(axis=2)
    crossing = kind == Kind.CROSSING

    # Per-cell geometry.  A cell with more than four segments necessarily
    # repeats a direction; it is reported once, as a degree violation.
    for x, y in _cells(~crossing & (total > 4)):
        out.append(Violation(DEGREE, x, y, f"{total[y, x]} wire segments at a node (max 4)"))
    for x, y in _cells(~crossing & (total <= 4) & has_dup):
        out.append(Violation(DUPLICATE_EDGE, x, y, "more than one wire on a grid edge"))
    for x, y in _cells(crossing & ~(wires == 1).all(axis=2)):
        segs = "".join(d * int(n) for d, n in zip(DIRS, wires[y, x]))
        out.append(Violation(BAD_CROSSING, x, y, f"crossing must carry exactly N,E,S,W once; has {segs or 'none'}"))
    for x, y in _cells((kind == Kind.EMPTY) & (total <= 4) & ~has_dup & (ndirs >= 3)):
        out.append(Violation(BARE_WIRE, x, y, f"{ndirs[y, x]} wires meet without a connection node"))

    off = np.zeros((H, Wd), bool)
    if H:
        off[0, :] |= present[0, :, N]
        off[-1, :] |= present[-1, :, S]
    if Wd:
        off[:, 0] |= present[:, 0, W]
        off[:, -1] |= present[:, -1, E]
    for x, y in _cells(off):
        out.append(Violation(OFF_GRID, x, y, "wire leaves the grid"))

    # Shared edges.  Net checks only look at edges both cells agree on.
    h_e, h_w = present[:, :-1, E], present[:, 1:, W]
    v_s, v_n = present[:-1, :, S], present[1:, :, N]
    for x, y in _cells(h_e != h_w):
        out.append(Violation(EDGE_MISMATCH, x, y, f"cells ({x},{y}) and ({x + 1},{y}) disagree on their shared edge"))
    for x, y in _cells(v_s != v_n):
        out.append(Violation(EDGE_MISMATCH, x, y, f"cells ({x},{y}) and ({x},{y + 1}) disagree on their shared edge"))

    h_wire, h_none = h_e & h_w, ~h_e & ~h_w
    v_wire, v_none = v_s & v_n, ~v_s & ~v_n
    h_lab, v_lab = c.h_net >= 0, c.v_net >= 0
    for x, y in _cells(h_wire & ~h_lab):
        out.append(Violation(NET_EDGE, x, y, f"wire ({x},{y})-({x + 1},{y}) belongs to no net"))
    for x, y in _cells(h_none & h_lab):
        out.append(Violation(NET_EDGE, x, y, f"net {c.h_net[y, x]} claims unwired edge ({x},{y})-({x + 1},{y})"))
    for x, y in _cells(v_wire & ~v_lab):
        out.append(Violation(NET_EDGE, x, y, f"wire ({x},{y})-({x},{y + 1}) belongs to no net"))
    for x, y in _cells(v_none & v_lab):
        out.append(Violation(NET_EDGE, x, y, f"net {c.v_net[y, x]} claims unwired edge ({x},{y})-({x},{y + 1})"))

    out.extend(_net_topology(c, h_wire & h_lab, v_wire & v_lab))
    out.extend(_pin_checks(c))
    return ValidationReport(tuple(out))


def _net_topology(c: GridCircuit, h_ok: np.ndarray, v_ok: np.ndarray) -> list[Violation]:
    """Connectivity and endpoint checks over the labeled, agreed wire edges."""
    H, Wd = c.height, c.width
    n_h = int(h_ok.sum())
    n_v = int(v_ok.sum())
    if n_h + n_v == 0:
        return []
    h_id = np.full(h_ok.shape, -1, np.int64)
    h_id[h_ok] = np.arange(n_h)
    v_id = np.full(v_ok.shape, -1, np.int64)
    v_id[v_ok] = np.arange(n_h, n_h + n_v)
    labels = np.concatenate([c.h_net[h_ok], c.v_net[v_ok]]).astype(np.int64)

    # Edge id incident to each cell in each direction (-1 if none).
    inc = np.full((H, Wd, 4), -1, np.int64)
    inc[:, :-1, E] = h_id
    inc[:, 1:, W] = h_id
    inc[:-1, :, S] = v_id
    inc[1:, :, N] = v_id
    lab = np.where(inc >= 0, labels[np.clip(inc, 0, None)], -1)

    crossing = c.kind == Kind.CROSSING
    rows, cols = [], []
    for a in range(4):
        for b in range(a + 1, 4):
            straight = (a, b) in ((N, S), (E, W))
            ok = (inc[..., a] >= 0) & (lab[..., a] == lab[..., b])
            if not straight:
                ok &= ~crossing
            rows.append(inc[..., a][ok])
            cols.append(inc[..., b][ok])
    m = n_h + n_v
    r = np.concatenate(rows)
    cc = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r), np.int8), (r, cc)), shape=(m, m))
    _, comp = connected_components(graph, directed=False)

    out: list[Violation] = []
    edge_xy = np.empty((m, 2), np.int64)
    hy, hx = np.nonzero(h_ok)
    vy, vx = np.nonzero(v_ok)
    edge_xy[:n_h, 0], edge_xy[:n_h, 1] = hx, hy
    edge_xy[n_h:, 0], edge_xy[n_h:, 1] = vx, vy

    pairs, first = np.unique(np.stack([labels, comp], axis=1), axis=0, return_index=True)
    net_ids, counts = np.unique(pairs[:, 0], return_counts=True)
    for net, cnt in zip(net_ids[counts > 1], counts[counts > 1]):
        idx = first[pairs[:, 0] == net]
        x, y = edge_xy[idx[1]]
        out.append(Violation(NET_DISCONNECTED, int(x), int(y), f"net {net} splits into {cnt} pieces"))

    # Leaf cells: a cell where exactly one incident edge carries the net.
    same = (lab[..., :, None] == lab[..., None, :]) & (lab[..., :, None] >= 0)
    mult = same.sum(axis=3)
    node = np.isin(c.kind, [int(k) for k in NODE_KINDS])
    leaf_bad = ((mult == 1) & ~node[..., None]).any(axis=2)
    for x, y in _cells(leaf_bad):
        out.append(Violation(NET_ENDPOINT, x, y, "wire ends at a cell that is not a node"))

    ys, xs, ds = np.nonzero((lab >= 0) & node[..., None])
    touched = np.unique(np.stack([lab[ys, xs, ds], ys * Wd + xs], axis=1), axis=0) if len(ys) else np.empty((0, 2), np.int64)
    node_count = dict(zip(*np.unique(touched[:, 0], return_counts=True))) if len(touched) else {}
    for net, idx in zip(*np.unique(labels, return_index=True)):
        if node_count.get(net, 0) < 2:
            x, y = edge_xy[idx]
            out.append(Violation(NET_ENDPOINT, int(x), int(y), f"net {net} joins fewer than two nodes"))
    return out


def _pin_checks(c: GridCircuit) -> list[Violation]:
    out: list[Violation] = []
    pin = c.kind == Kind.IO_PIN
    role = c.pin_role
    for x, y in _cells(~pin & ((role != PinRole.NONE) | (c.pin_index >= 0))):
        out.append(Violation(PIN_LIST, x, y, "pin role/index on a cell that is not an I/O pin"))
    for x, y in _cells(pin & (role == PinRole.NONE)):
        out.append(Violation(PIN_LIST, x, y, "I/O pin without a role"))

    for name, pins, bit in (("input", c.input_pins, PinRole.INPUT), ("output", c.output_pins, PinRole.OUTPUT)):
        seen: set[tuple[int, int]] = set()
        for x, y in pins:
            if (x, y) in seen:
                out.append(Violation(PIN_LIST, x, y, f"duplicate entry in {name} pin list"))
            seen.add((x, y))
            if not pin[y, x] or not (int(role[y, x]) & bit):
                out.append(Violation(PIN_LIST, x, y, f"{name} pin list names a cell without {name} role"))
        for x, y in _cells(pin & ((role & bit) != 0)):
            if (x, y) not in seen:
                out.append(Violation(PIN_LIST, x, y, f"{name} pin missing from the {name} pin list"))

    idx = c.pin_index[pin]
    if len(idx):
        expected = np.arange(len(idx))
        if not np.array_equal(np.sort(idx), expected):
            bad = np.setdiff1d(idx, expected)
            vals, cnt = np.unique(idx, return_counts=True)
            bad = np.union1d(bad, vals[cnt > 1])
            for x, y in _cells(pin & np.isin(c.pin_index, bad)):
                out.append(
                    Violation(PIN_INDEX, x, y, f"pin index {c.pin_index[y, x]} breaks the 0..{len(idx) - 1} numbering")
                )
    return out


# -- accounting -------------------------------------------------------------


def _require_valid(circuit: GridCircuit) -> None:
    report = circuit.report
    if not report.valid:
        raise InvalidCircuitError(report.violations[0])


def area(circuit: GridCircuit, tech: TechParams = TechParams()) -> float:
    """Wired area: occupied cells times ``lambda^2``."""
    _require_valid(circuit)
    return circuit.occupied_count * tech.lam**2


def energy(circuit: GridCircuit, tau: float, tech: TechParams = TechParams()) -> float:
    """Processing energy ``xi * A * tau`` for ``tau`` clock cycles."""
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    return tech.xi * area(circuit, tech) * tau


# -- serialization ------------------------------------------------------------


def _runs(edges: list[Edge]) -> list[str]:
    """Compress a net's edges into maximal straight runs ``h:x0,y,x1`` / ``v:x,y0,y1``."""
    horiz: dict[int, list[int]] = {}
    vert: dict[int, list[int]] = {}
    for (x0, y0), (x1, y1) in edges:
        if y0 == y1:
            horiz.setdefault(y0, []).append(x0)
        else:
            vert.setdefault(x0, []).append(y0)
    out = []
    for fixed, starts, tag in [(k, v, "h") for k, v in sorted(horiz.items())] + [
        (k, v, "v") for k, v in sorted(vert.items())
    ]:
        starts = sorted(starts)
        lo = prev = starts[0]
        for s in starts[1:] + [None]:
            if s is not None and s == prev + 1:
                prev = s
                continue
            out.append(f"h:{lo},{fixed},{prev + 1}" if tag == "h" else f"v:{fixed},{lo},{prev + 1}")
            if s is not None:
                lo = prev = s
    return out


def dumps(circuit: GridCircuit, lam: float = 1.0) -> str:
    """Serialise to the versioned circuit text format."""
    doc = textio.Document(
        header={
            "format": "grid_circuit",
            "version": str(FORMAT_VERSION),
            "width": str(circuit.width),
            "height": str(circuit.height),
            "lambda": repr(float(lam)),
        }
    )
    nonempty = (
        (circuit.kind != Kind.EMPTY)
        | (circuit.wires.sum(axis=2) > 0)
        | (circuit.pin_role != PinRole.NONE)
        | (circuit.pin_index >= 0)
    )
    rows = []
    for x, y in _cells(nonempty):
        cell = circuit.cell(x, y)
        rows.append(
            [
                str(x),
                str(y),
                cell.kind,
                "".join(cell.wire_edges) or "-",
                cell.pin_role or "-",
                "-" if cell.pin_index is None else str(cell.pin_index),
            ]
        )
    doc.sections["cells"] = rows
    doc.sections["nets"] = [[str(label)] + _runs(edges) for label, edges in circuit.nets.items()]
    doc.sections["inputs"] = [[str(x), str(y)] for x, y in circuit.input_pins]
    doc.sections["outputs"] = [[str(x), str(y)] for x, y in circuit.output_pins]
    return textio.dump(doc)


def loads(text: str) -> tuple[GridCircuit, float]:
    """Parse a circuit document; returns ``(circuit, lambda)``."""
    doc = textio.parse(text)
    if doc.get("format", "grid_circuit") != "grid_circuit":
        raise textio.FormatError(f"not a circuit file (format = {doc.get('format')})")
    version = int(doc.require("version"))
    if version != FORMAT_VERSION:
        raise textio.FormatError(f"unsupported circuit format version {version}")
    width, height = int(doc.require("width")), int(doc.require("height"))
    lam = float(doc.get("lambda", "1.0"))
    b = CircuitBuilder(width, height)
    try:
        for row in doc.rows("cells"):
            x, y, kind, edges, role, index = row
            b.set_cell(
                int(x),
                int(y),
                Cell(
                    kind=kind,
                    wire_edges=tuple("" if edges == "-" else edges),
                    pin_role=None if role == "-" else role,
                    pin_index=None if index == "-" else int(index),
                ),
            )
        for row in doc.rows("nets"):
            label = int(row[0])
            for run in row[1:]:
                tag, coords = run.split(":")
                a, bb, cc = (int(t) for t in coords.split(","))
                if tag == "h":
                    for x in range(a, cc):
                        b.label_edge(((x, bb), (x + 1, bb)), label)
                elif tag == "v":
                    for y in range(bb, cc):
                        b.label_edge(((a, y), (a, y + 1)), label)
                else:
                    raise textio.FormatError(f"bad net run {run!r}")
        b.input_pins = [(int(x), int(y)) for x, y in doc.rows("inputs")]
        b.output_pins = [(int(x), int(y)) for x, y in doc.rows("outputs")]
    except (ValueError, IndexError) as exc:
        raise textio.FormatError(str(exc)) from exc
    return b.freeze(), lam
