import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_edges, hidden_pair_topology, pair_kind, topology_with_stations
from wlanvoip.conflict import (
    ConflictGraph,
    EdgeKind,
    build_admission_graph,
    build_coloring_graph,
    conflict_test,
    sessions_from_topology,
)
from wlanvoip.errors import InvalidParameter
from wlanvoip.geometry import Cell, RadioParams, Station, Topology, assign_frequencies, build_topology, hexagon_gap

D_MAX = 250.0


def _as_labels(graph: ConflictGraph) -> dict:
    return {k: v.value for k, v in graph.edges.items()}


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32),
    D=st.integers(1, 3),
    per_cell=st.integers(0, 3),
    cs=st.sampled_from([0.0, 150.0, 250.0, 409.25, 550.0]),
    scheme=st.sampled_from(["single", "three_channel"]),
)
def test_graphs_match_brute_force(seed, D, per_cell, cs, scheme):
    topo = assign_frequencies(build_topology(D, stations_per_cell=per_cell, seed=seed), scheme)
    assert len(topo.stations) <= 30
    assert _as_labels(build_admission_graph(topo, cs)) == brute_force_edges(topo, cs, "admission")
    assert _as_labels(build_coloring_graph(topo, cs)) == brute_force_edges(topo, cs, "coloring")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), cs=st.floats(0, 800))
def test_conflict_test_symmetric_and_matches_oracle(seed, cs):
    topo = build_topology(2, stations_per_cell=3, seed=seed)
    sessions = sessions_from_topology(topo)
    for a, b in itertools.combinations(sessions, 2):
        if a.ap_cell_id == b.ap_cell_id:
            continue
        k = conflict_test(a, b, topo, cs)
        assert k == conflict_test(b, a, topo, cs)
        assert k == pair_kind(topo, a.vertex_id, b.vertex_id, cs)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32), lo=st.floats(0, 600), extra=st.floats(0, 300))
def test_larger_cs_range_is_monotone(seed, lo, extra):
    topo = build_topology(2, stations_per_cell=4, seed=seed)
    hi = lo + extra
    a_lo, a_hi = build_admission_graph(topo, lo), build_admission_graph(topo, hi)
    cs_lo = {e for e, k in a_lo.edges.items() if k is EdgeKind.CS_COUPLED}
    assert cs_lo <= {e for e, k in a_hi.edges.items() if k is EdgeKind.CS_COUPLED}
    # carrier sensing only ever merges edge kinds; the edge set itself only grows
    assert set(a_lo.edges) <= set(a_hi.edges)
    c_lo, c_hi = build_coloring_graph(topo, lo), build_coloring_graph(topo, hi)
    gap = lambda g: {e for e, k in g.edges.items() if k is EdgeKind.INTRA_CS_GAP}
    assert gap(c_hi) <= gap(c_lo)


def test_single_cell_admission_graph_is_complete():
    topo = build_topology(1, stations_per_cell=12, seed=4)
    g = build_admission_graph(topo)
    assert len(g.edges) == 12 * 11 // 2
    assert all(k is EdgeKind.SAME_CELL for k in g.edges.values())


def test_empty_topology_gives_empty_graph():
    g = build_admission_graph(build_topology(3))
    assert g.vertices == () and g.edges == {}


def test_admission_cells_are_complete_subgraphs():
    topo = build_topology(3, stations_per_cell=5, seed=2)
    g = build_admission_graph(topo)
    for u, w in itertools.combinations(range(len(topo.stations)), 2):
        if topo.stations[u].cell_id == topo.stations[w].cell_id:
            assert g.has_edge(u, w)


def test_different_channels_have_no_cross_edges():
    topo = assign_frequencies(build_topology(3, stations_per_cell=6, seed=8), "three_channel")
    for g in (build_admission_graph(topo, 2000.0), build_coloring_graph(topo, 2000.0)):
        for u, w in g.edges:
            cu, cw = g.cell_of(u), g.cell_of(w)
            if cu != cw:
                assert topo.cells[cu].frequency_channel == topo.cells[cw].frequency_channel


def test_coloring_graph_has_no_intra_edges_at_cell_diameter():
    topo = build_topology(3, stations_per_cell=12, seed=1)
    g = build_coloring_graph(topo, 2 * D_MAX)
    assert not any(k is EdgeKind.INTRA_CS_GAP for k in g.edges.values())


def test_far_apart_cells_are_disconnected():
    topo = build_topology(4)
    chosen = []
    for c in topo.cells:
        if all(hexagon_gap(c.center, o.center, D_MAX) >= 866.0 - 1e-6 for o in chosen):
            chosen.append(c)
    assert len(chosen) >= 3  # cells 0, 3 and 13 in this orientation
    full = build_topology(4, stations_per_cell=12, seed=21)
    keep = {c.cell_id for c in chosen}
    points = [(*s.position, s.cell_id) for s in full.stations if s.cell_id in keep]
    sub = topology_with_stations(4, points)
    g = build_admission_graph(sub, 550.0)
    assert all(g.cell_of(u) == g.cell_of(w) for u, w in g.edges)


def test_colocated_clients_are_cs_coupled_even_at_zero_range():
    topo = build_topology(2)
    a, b = topo.cells[0].center, topo.cells[1].center
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    t = topology_with_stations(2, [(*mid, 0), (*mid, 1)])
    s = sessions_from_topology(t)
    assert conflict_test(s[0], s[1], t, 0.0) == "cs_coupled"


def test_hidden_node_at_300m_with_full_links():
    # clients 300 m apart on the line between APs 800 m apart, both links 250 m
    cells = (Cell(0, (0.0, 0.0), 0), Cell(1, (800.0, 0.0), 0))
    stations = (Station(0, (250.0, 0.0), 0, 250.0), Station(1, (550.0, 0.0), 1, 250.0))
    topo = Topology(1, cells, stations, RadioParams())
    s = sessions_from_topology(topo)
    assert conflict_test(s[0], s[1], topo, 0.0) == "hidden_node"
    assert conflict_test(s[0], s[1], topo, 300.0) == "cs_coupled"


def test_conflict_test_rejects_same_cell_pair():
    topo = build_topology(1, stations_per_cell=2, seed=0)
    s = sessions_from_topology(topo)
    with pytest.raises(InvalidParameter):
        conflict_test(s[0], s[1], topo, 100.0)


def test_negative_cs_range_rejected():
    with pytest.raises(InvalidParameter):
        build_admission_graph(build_topology(1, stations_per_cell=2), -1.0)


def test_hidden_pair_layout_edges():
    topo = hidden_pair_topology()
    assert topo.cells[0].frequency_channel == topo.cells[4].frequency_channel
    g = build_coloring_graph(topo, 250.0)
    cross = {e: k for e, k in g.edges.items() if g.cell_of(e[0]) != g.cell_of(e[1])}
    assert cross == {(2, 4): EdgeKind.HIDDEN_NODE}
    assert _as_labels(g) == brute_force_edges(topo, 250.0, "coloring")


def test_graph_json_lists_labelled_edges():
    topo = hidden_pair_topology()
    doc = build_coloring_graph(topo, 250.0).to_dict()
    assert [2, 4, "hidden_node"] in doc["edges"]
    assert len(doc["vertices"]) == 6
