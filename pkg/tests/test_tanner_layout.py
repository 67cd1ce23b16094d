from __future__ import annotations

import numpy as np
import pytest
from helpers import random_tanner, six_cycle
from hypothesis import given, settings
from hypothesis import strategies as st

from vlsidec import grid_circuit as gc
from vlsidec.bec_sim import sample_regular_code
from vlsidec.grid_circuit import Kind, TechParams
from vlsidec.tanner_layout import (
    NodeAreaModel,
    TannerGraph,
    area_bound,
    area_report,
    dumps,
    energy_upper,
    layout,
    loads,
    loglog_iterations,
)


def test_six_cycle_layout():
    g = six_cycle()
    c = layout(g)
    assert gc.validate(c).valid
    rep = area_report(c, g)
    assert rep.wire_area <= 2 * g.n_edges**2
    assert rep.node_area == 6 * 4
    assert rep.total == c.occupied_count
    # one private column per edge between the two bands, each band two box widths wide
    assert c.width == 4 + 6 + 4
    assert c.height == 12


def test_pins_follow_design_dimension():
    g = TannerGraph(4, 2, ((0, 0), (1, 0), (2, 1), (3, 1), (0, 1), (2, 0)))
    c = layout(g)
    assert gc.validate(c).valid
    assert len(c.input_pins) == 4
    assert len(c.output_pins) == g.k == 2
    roles = {c.cell(x, y).pin_role for x, y in c.input_pins}
    assert roles == {"input", "both"}


def test_degree_zero_nodes_take_no_area():
    g = TannerGraph(3, 2, ((0, 0), (1, 0), (0, 1), (1, 1)))
    c = layout(g)
    assert gc.validate(c).valid
    assert len(c.input_pins) == 2


def test_declared_degrees_checked():
    with pytest.raises(ValueError):
        TannerGraph(2, 1, ((0, 0), (1, 0)), d_v=2)
    with pytest.raises(ValueError):
        TannerGraph(2, 1, ((0, 3),))


def test_multi_edges_route():
    g = TannerGraph(2, 1, ((0, 0), (0, 0), (1, 0), (1, 0)))
    c = layout(g)
    assert gc.validate(c).valid
    assert area_report(c, g).wire_area <= 2 * 16


def test_custom_node_area_model():
    g = six_cycle()
    c = layout(g, NodeAreaModel(lambda d: 3 * d))
    assert gc.validate(c).valid
    assert area_report(c, g).node_area == 6 * 2 * 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_random_layouts_validate_under_bound(seed):
    g = random_tanner(np.random.default_rng(seed))
    c = layout(g)
    assert gc.validate(c).valid
    rep = area_report(c, g)
    bound = area_bound(g)
    assert rep.wire_area <= bound.wire_area
    assert rep.node_area == bound.node_area


def test_crossings_are_exactly_the_row_column_meets():
    g = sample_regular_code(8, 3, 4, seed=2)
    c = layout(g)
    cross = c.kind == Kind.CROSSING
    assert cross.any()
    assert (c.wires[cross] == 1).all()


def test_energy_upper_matches_measured_energy():
    g = sample_regular_code(16, 3, 4, seed=1)
    c = layout(g)
    tech = TechParams(xi=0.25, lam=2.0)
    n_it = loglog_iterations(16)
    assert energy_upper(g, n_it, tech, circuit=c) == gc.energy(c, 2 * n_it, tech)
    assert energy_upper(g, n_it, tech) >= energy_upper(g, n_it, tech, circuit=c)


@pytest.mark.parametrize("n,expected", [(2, 1), (4, 1), (16, 2), (17, 3), (256, 3), (257, 4), (65536, 4)])
def test_loglog_iterations(n, expected):
    assert loglog_iterations(n) == expected


def test_text_round_trip():
    g = sample_regular_code(12, 3, 4, seed=5)
    assert loads(dumps(g)) == g


def test_wire_budget_on_small_degenerate_codes():
    for dv in range(1, 5):
        for dc in range(1, 7):
            for n in range(dc, 6 * dc + 1, dc):
                g = sample_regular_code(n, dv, dc, seed=n)
                c = layout(g)
                assert gc.validate(c).valid
                assert area_report(c, g).wire_area <= 2 * g.n_edges**2


def test_circuit_contraction_recovers_tanner_graph():
    from vlsidec.bisection import CircuitGraph

    g = sample_regular_code(16, 3, 4, seed=1)
    cg = CircuitGraph.from_circuit(layout(g))
    assert cg.n_vertices == g.n_var + g.n_chk
    assert len(cg.marked) == g.k and len(cg.inputs) == g.n_var
    assert sum(m for *_, m in cg.edges) == g.n_edges
