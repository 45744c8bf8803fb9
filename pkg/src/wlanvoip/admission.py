"""Clique-analytical call admission.

Each admitted vertex ``v`` carries ``K_v``, the maximal cliques of the admitted
conflict graph that contain ``v``, and ``m_v``, the size of the largest one. A
new session is admitted only if no neighbour's largest clique would grow past
``C_max``.

The update for a new vertex ``x`` with admitted neighbourhood ``N`` rests on a
standard fact: every maximal clique of ``G + x`` is either an old maximal
clique ``C`` (possibly extended by ``x`` when ``C`` is inside ``N``) or
``(C & N) | {x}`` for some old maximal clique ``C``. Families of non-neighbours
are untouched because ``x`` cannot join any of their cliques.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .conflict import ConflictGraph, build_admission_graph
from .errors import DuplicateVertex, InvalidParameter, UnknownVertex
from .geometry import Topology

Clique = frozenset


def no_redundancy(family: Iterable[frozenset]) -> set[frozenset]:
    """Keep only the inclusion-maximal sets; duplicates collapse to one."""
    # larger sets first, so each candidate only needs checking against kept ones
    ordered = sorted(set(family), key=len, reverse=True)
    kept: list[frozenset] = []
    for c in ordered:
        if not any(c < k for k in kept):
            kept.append(c)
    return set(kept)


@dataclass
class CliqueFamily:
    vertex: int
    cliques: set[frozenset]

    @property
    def m(self) -> int:
        return max((len(c) for c in self.cliques), default=0)


@dataclass
class AdmissionState:
    admitted: set[int] = field(default_factory=set)
    families: dict[int, set[frozenset]] = field(default_factory=dict)
    neighbors: dict[int, frozenset[int]] = field(default_factory=dict)

    def family(self, v: int) -> CliqueFamily:
        if v not in self.families:
            raise UnknownVertex(v)
        return CliqueFamily(v, self.families[v])

    def m(self, v: int) -> int:
        return max_clique_size_at(self, v)

    def max_m(self) -> int:
        return max((max(len(c) for c in fam) for fam in self.families.values()), default=0)

    def to_dict(self) -> dict:
        return {
            "admitted": sorted(self.admitted),
            "families": {
                str(v): sorted(sorted(c) for c in self.families[v]) for v in sorted(self.families)
            },
            "neighbors": {str(v): sorted(self.neighbors[v]) for v in sorted(self.neighbors)},
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def max_clique_size_at(state: AdmissionState, v: int) -> int:
    if v not in state.families:
        raise UnknownVertex(v)
    return max(len(c) for c in state.families[v])


def admit(state: AdmissionState, v_new: int, neighbors: Iterable[int], c_max: float) -> tuple[bool, AdmissionState]:
    """Try to admit ``v_new`` whose admitted neighbours are ``neighbors``.

    Returns ``(True, state)`` with ``state`` updated in place on admission, or
    ``(False, state)`` with ``state`` untouched on rejection. Prospective
    families are built on the side and committed only once every neighbour
    passes the ``C_max`` check, so a rejection never mutates anything.
    """
    if c_max < 1:
        raise InvalidParameter(f"C_max must be >= 1, got {c_max}")
    if v_new in state.admitted:
        raise DuplicateVertex(v_new)
    nbrs = frozenset(neighbors)
    unknown = nbrs - state.admitted
    if unknown:
        raise UnknownVertex(sorted(unknown))

    pending: dict[int, set[frozenset]] = {}
    new_family: set[frozenset] = set()
    for vj in sorted(nbrs):
        updated: list[frozenset] = []
        for c in state.families[vj]:
            if c <= nbrs:
                grown = c | {v_new}
                updated.append(grown)
                new_family.add(grown)
            else:
                updated.append(c)
                spawned = (c & nbrs) | {v_new}
                updated.append(spawned)
                new_family.add(spawned)
        fam = no_redundancy(updated)
        if max(len(c) for c in fam) > c_max:
            return False, state
        pending[vj] = fam

    for vj, fam in pending.items():
        state.families[vj] = fam
        state.neighbors[vj] = state.neighbors[vj] | {v_new}
    state.families[v_new] = no_redundancy(new_family) if new_family else {frozenset({v_new})}
    state.neighbors[v_new] = nbrs
    state.admitted.add(v_new)
    return True, state


@dataclass
class Decision:
    request_index: int
    vertex: int
    station_id: int
    cell_id: int
    admitted: bool
    admitted_total: int
    max_m_after: int
    wall_time_s: float


@dataclass
class AdmissionReport:
    decisions: list[Decision]
    num_cells: int
    c_max: float

    @property
    def admitted_total(self) -> int:
        return sum(d.admitted for d in self.decisions)

    def per_ap_counts(self) -> list[int]:
        counts = [0] * self.num_cells
        for d in self.decisions:
            if d.admitted:
                counts[d.cell_id] += 1
        return counts

    def csv_rows(self) -> list[tuple]:
        return [
            (d.request_index, d.station_id, d.cell_id, "admitted" if d.admitted else "rejected", d.admitted_total, d.max_m_after)
            for d in self.decisions
        ]


CSV_COLUMNS = ("request_index", "station_id", "cell_id", "decision", "admitted_total", "max_m_after")


def run_admission_stream(
    topology: Topology,
    cs_range: float | None,
    candidates: Sequence[int],
    c_max: float,
    graph: ConflictGraph | None = None,
) -> tuple[AdmissionReport, AdmissionState]:
    """Offer ``candidates`` (station ids) one at a time; rejected ones are dropped for good."""
    if graph is None:
        graph = build_admission_graph(topology, cs_range)
    state = AdmissionState()
    decisions: list[Decision] = []
    for idx, v in enumerate(candidates):
        t0 = time.perf_counter()
        nbrs = graph.neighbors[v] & state.admitted
        ok, state = admit(state, v, nbrs, c_max)
        dt = time.perf_counter() - t0
        decisions.append(
            Decision(idx, v, graph.vertices[v].station_id, graph.vertices[v].ap_cell_id, ok,
                     len(state.admitted), state.max_m(), dt)
        )
    return AdmissionReport(decisions, len(topology.cells), c_max), state


def arrival_order(num_stations: int, seed: int) -> list[int]:
    """Uniform random arrival order, seeded independently of station placement."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0, 1)))
    return [int(i) for i in rng.permutation(num_stations)]
