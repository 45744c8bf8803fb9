"""Conflict graphs over VoIP sessions.

One vertex per bidirectional session (client station plus its AP). Two
flavours are built:

* ``admission`` graphs: an edge means the two sessions share airtime. Every
  pair inside one cell is connected; cross-cell pairs are connected when the
  carrier-sense or hidden-node test fires.
* ``coloring`` graphs: an edge means the two sessions must not get the same
  (frequency, slot) combination. Inside a cell the edge appears only when the
  two clients cannot carrier-sense each other; across cells the same
  carrier-sense / hidden-node test as above applies.

Cross-cell edges are only drawn between cells on the same frequency channel
(or when either cell has no channel assigned yet).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidParameter
from .geometry import TOL, Topology, interference_range


class EdgeKind(str, Enum):
    SAME_CELL = "same_cell"
    CS_COUPLED = "cs_coupled"
    HIDDEN_NODE = "hidden_node"
    INTRA_CS_GAP = "intra_cs_gap"


@dataclass(frozen=True)
class Session:
    vertex_id: int
    station_id: int
    ap_cell_id: int
    link_length: float


@dataclass(frozen=True)
class ConflictGraph:
    mode: str
    vertices: tuple[Session, ...]
    edges: dict[tuple[int, int], EdgeKind]
    neighbors: dict[int, frozenset[int]] = field(repr=False)

    @classmethod
    def from_edges(cls, mode: str, vertices, edges: dict[tuple[int, int], EdgeKind]) -> "ConflictGraph":
        nbrs: dict[int, set[int]] = {v.vertex_id: set() for v in vertices}
        norm: dict[tuple[int, int], EdgeKind] = {}
        for (u, w), kind in edges.items():
            if u == w:
                raise InvalidParameter(f"self-loop on vertex {u}")
            a, b = (u, w) if u < w else (w, u)
            norm[(a, b)] = EdgeKind(kind)
            nbrs[a].add(b)
            nbrs[b].add(a)
        return cls(mode, tuple(vertices), dict(sorted(norm.items())), {k: frozenset(v) for k, v in nbrs.items()})

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def has_edge(self, u: int, w: int) -> bool:
        return w in self.neighbors.get(u, ())

    def cell_of(self, v: int) -> int:
        return self.vertices[v].ap_cell_id

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "vertices": [
                {"id": s.vertex_id, "station": s.station_id, "cell": s.ap_cell_id, "link_length": s.link_length}
                for s in self.vertices
            ],
            "edges": [[u, w, kind.value] for (u, w), kind in self.edges.items()],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def sessions_from_topology(topology: Topology) -> tuple[Session, ...]:
    """Vertex ``i`` is the session of station ``i``."""
    return tuple(Session(i, s.station_id, s.cell_id, s.link_length) for i, s in enumerate(topology.stations))


def conflict_test(s_i: Session, s_j: Session, topology: Topology, cs_range: float) -> str:
    """Classify a cross-cell session pair as ``none``, ``cs_coupled`` or ``hidden_node``."""
    if s_i.ap_cell_id == s_j.ap_cell_id:
        raise InvalidParameter("conflict_test needs sessions from different cells")
    ci = topology.stations[s_i.station_id].position
    cj = topology.stations[s_j.station_id].position
    ai = topology.ap_position(s_i.ap_cell_id)
    aj = topology.ap_position(s_j.ap_cell_id)
    d_cc = math.dist(ci, cj)
    d_ca = math.dist(ci, aj)
    d_ac = math.dist(ai, cj)
    d_aa = math.dist(ai, aj)

    if cs_range >= min(d_cc, d_ca, d_ac, d_aa) - TOL:
        return EdgeKind.CS_COUPLED.value

    delta = topology.radio.delta
    # an AP's interference range is taken on its link to this session's client
    ir_client_i = ir_ap_i = interference_range(s_i.link_length, delta)
    ir_client_j = ir_ap_j = interference_range(s_j.link_length, delta)
    if (
        ir_client_i > min(d_cc, d_ca) + TOL
        or ir_ap_i > min(d_ac, d_aa) + TOL
        or ir_client_j > min(d_cc, d_ac) + TOL
        or ir_ap_j > min(d_ca, d_aa) + TOL
    ):
        return EdgeKind.HIDDEN_NODE.value
    return "none"


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def _cross_cell_kinds(topology: Topology, cs_range: float) -> tuple[np.ndarray, np.ndarray]:
    """Boolean (cs_coupled, hidden_node) matrices over all station pairs.

    Only meaningful off the same-cell blocks; callers mask those out.
    """
    xy = topology.station_xy()
    cell_ids = np.array([s.cell_id for s in topology.stations], dtype=int)
    centers = np.array([c.center for c in topology.cells], dtype=float).reshape(-1, 2)
    ap = centers[cell_ids] if len(cell_ids) else np.zeros((0, 2))
    links = np.array([s.link_length for s in topology.stations], dtype=float)

    d_cc = _pairwise(xy, xy)
    d_ca = _pairwise(xy, ap)  # client i to AP of j
    d_ac = d_ca.T  # AP of i to client j
    d_aa = _pairwise(centers, centers)[cell_ids[:, None], cell_ids[None, :]]

    cs = cs_range >= np.minimum(np.minimum(d_cc, d_ca), np.minimum(d_ac, d_aa)) - TOL
    ir = interference_range(links, topology.radio.delta)
    ir_i = ir[:, None]
    ir_j = ir[None, :]
    hidden = (
        (ir_i > np.minimum(d_cc, d_ca) + TOL)
        | (ir_i > np.minimum(d_ac, d_aa) + TOL)
        | (ir_j > np.minimum(d_cc, d_ac) + TOL)
        | (ir_j > np.minimum(d_ca, d_aa) + TOL)
    )
    return cs, hidden & ~cs


def _co_channel_mask(topology: Topology, cell_ids: np.ndarray) -> np.ndarray:
    channels = np.array(
        [-1 if c.frequency_channel is None else c.frequency_channel for c in topology.cells], dtype=int
    )
    ch = channels[cell_ids]
    unassigned = ch < 0
    return (ch[:, None] == ch[None, :]) | unassigned[:, None] | unassigned[None, :]


def _build(topology: Topology, cs_range: float, mode: str) -> ConflictGraph:
    if cs_range < 0:
        raise InvalidParameter(f"cs_range must be >= 0, got {cs_range}")
    vertices = sessions_from_topology(topology)
    n = len(vertices)
    if n == 0:
        return ConflictGraph.from_edges(mode, vertices, {})
    cell_ids = np.array([s.ap_cell_id for s in vertices], dtype=int)
    same_cell = cell_ids[:, None] == cell_ids[None, :]
    cs, hidden = _cross_cell_kinds(topology, cs_range)
    cross = ~same_cell & _co_channel_mask(topology, cell_ids)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)

    kinds = np.zeros((n, n), dtype=np.int8)
    kinds[cross & cs] = 2
    kinds[cross & hidden] = 3
    if mode == "admission":
        kinds[same_cell] = 1
    else:
        xy = topology.station_xy()
        kinds[same_cell & (_pairwise(xy, xy) > cs_range + TOL)] = 4
    kinds[~upper] = 0

    lookup = {1: EdgeKind.SAME_CELL, 2: EdgeKind.CS_COUPLED, 3: EdgeKind.HIDDEN_NODE, 4: EdgeKind.INTRA_CS_GAP}
    us, ws = np.nonzero(kinds)
    edges = {(int(u), int(w)): lookup[int(kinds[u, w])] for u, w in zip(us, ws)}
    return ConflictGraph.from_edges(mode, vertices, edges)


def build_admission_graph(topology: Topology, cs_range: float | None = None) -> ConflictGraph:
    """Airtime-competition graph: same-cell pairs always, cross-cell pairs on conflict."""
    return _build(topology, topology.radio.cs_range if cs_range is None else cs_range, "admission")


def build_coloring_graph(topology: Topology, cs_range: float | None = None) -> ConflictGraph:
    """Forbidden-combination graph: same-cell pairs out of carrier-sense reach, cross-cell pairs on conflict."""
    return _build(topology, topology.radio.cs_range if cs_range is None else cs_range, "coloring")
