"""CoTDMA two-layer coloring: a frequency per cell, a time slot per session.

A coloring is feasible when

1. frequencies lie in ``[0, m)`` and slots in ``[0, n)``;
2. every colored session of a cell uses its cell's frequency;
3. at most ``k = C_AP_1 // n`` sessions of one cell share a slot, and
   same-cell sessions that cannot carrier-sense each other (an edge in the
   coloring graph) never share one;
4. sessions joined by a cross-cell edge get different (frequency, slot) pairs.

``color`` is a Welsh-Powell style greedy: vertices in non-increasing degree
order (ties by id), each taking the lowest feasible combination or staying
uncolored.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .conflict import ConflictGraph, build_coloring_graph
from .errors import InvalidParameter, PlanMissing, UnsupportedSectorCount
from .geometry import Topology, assign_frequencies, build_topology, sector_cs_range
from .seeding import derive_seed


def k_per_slot(c_ap_1: int, n: int) -> int:
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    return c_ap_1 // n


@dataclass(frozen=True)
class CoTDMAParams:
    m: int = 3
    n: int = 3
    C_AP_1: int = 12
    frequency_plan: str = "fixed"

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidParameter(f"need m >= 1 and n >= 1, got m={self.m}, n={self.n}")
        if self.C_AP_1 < 0:
            raise InvalidParameter("C_AP_1 must be >= 0")
        if self.frequency_plan not in ("fixed", "free"):
            raise InvalidParameter(f"frequency_plan must be 'fixed' or 'free', got {self.frequency_plan!r}")

    @property
    def k(self) -> int:
        return k_per_slot(self.C_AP_1, self.n)


@dataclass
class ColorAssignment:
    cell_first_color: dict[int, int] = field(default_factory=dict)
    vertex_second_color: dict[int, int | None] = field(default_factory=dict)
    occupancy: dict[tuple[int, int], int] = field(default_factory=dict)

    def combo(self, graph: ConflictGraph, v: int) -> tuple[int | None, int] | None:
        t = self.vertex_second_color.get(v)
        if t is None:
            return None
        return self.cell_first_color.get(graph.cell_of(v)), t

    def export(self, graph: ConflictGraph) -> dict:
        """``{"cells": {cell: f}, "vertices": {v: {"f": f, "t": t}}}``; uncolored vertices get nulls."""
        vertices = {}
        for v, t in sorted(self.vertex_second_color.items()):
            f = None if t is None else self.cell_first_color.get(graph.cell_of(v))
            vertices[str(v)] = {"f": f, "t": t}
        return {"cells": {str(c): f for c, f in sorted(self.cell_first_color.items())}, "vertices": vertices}


@dataclass
class ColoringResult:
    assignment: ColorAssignment
    colored_count: int
    total: int

    @property
    def coverage(self) -> float:
        return self.colored_count / self.total if self.total else 1.0


def cell_channels(topology: Topology) -> dict[int, int]:
    return {c.cell_id: c.frequency_channel for c in topology.cells if c.frequency_channel is not None}


def welsh_powell_order(graph: ConflictGraph) -> list[int]:
    return sorted((s.vertex_id for s in graph.vertices), key=lambda v: (-graph.degree(v), v))


def color(graph: ConflictGraph, params: CoTDMAParams, channels: Mapping[int, int] | None = None) -> ColoringResult:
    """Greedy two-layer coloring of a coloring-mode conflict graph.

    With ``params.frequency_plan == "fixed"`` every cell takes its frequency
    from ``channels``; with ``"free"`` a cell's frequency is fixed by its
    first colored vertex, scanning (frequency, slot) pairs lexicographically.
    """
    k = params.k
    cells = sorted({s.ap_cell_id for s in graph.vertices})
    first: dict[int, int] = {}
    if params.frequency_plan == "fixed":
        channels = channels or {}
        missing = [c for c in cells if c not in channels]
        if missing:
            raise PlanMissing(f"fixed frequency plan has no channel for cells {missing}")
        bad = [c for c in cells if not 0 <= channels[c] < params.m]
        if bad:
            raise InvalidParameter(f"channels outside [0, {params.m}) for cells {bad}")
        first = {c: int(channels[c]) for c in cells}

    second: dict[int, int | None] = {s.vertex_id: None for s in graph.vertices}
    occupancy: dict[tuple[int, int], int] = defaultdict(int)
    combo: dict[int, tuple[int, int]] = {}

    for v in welsh_powell_order(graph):
        cell = graph.cell_of(v)
        blocked = {combo[w] for w in graph.neighbors[v] if w in combo}
        freqs = [first[cell]] if cell in first else range(params.m)
        for f in freqs:
            chosen = next(
                (t for t in range(params.n) if occupancy[(cell, t)] < k and (f, t) not in blocked),
                None,
            )
            if chosen is not None:
                first.setdefault(cell, f)
                second[v] = chosen
                combo[v] = (f, chosen)
                occupancy[(cell, chosen)] += 1
                break

    assignment = ColorAssignment(first, second, {key: cnt for key, cnt in sorted(occupancy.items()) if cnt})
    return ColoringResult(assignment, len(combo), len(graph.vertices))


@dataclass(frozen=True)
class Violation:
    constraint: int
    vertices: tuple[int, ...]
    message: str


def validate_assignment(graph: ConflictGraph, assignment: ColorAssignment, params: CoTDMAParams) -> list[Violation]:
    """Check an assignment against the four CoTDMA constraints from scratch."""
    out: list[Violation] = []
    colored = {v: t for v, t in assignment.vertex_second_color.items() if t is not None}

    for c, f in sorted(assignment.cell_first_color.items()):
        if not 0 <= f < params.m:
            members = tuple(v for v in colored if graph.cell_of(v) == c)
            out.append(Violation(1, members, f"cell {c} frequency {f} outside [0, {params.m})"))
    for v, t in sorted(colored.items()):
        if not 0 <= t < params.n:
            out.append(Violation(1, (v,), f"vertex {v} slot {t} outside [0, {params.n})"))

    for v in sorted(colored):
        if graph.cell_of(v) not in assignment.cell_first_color:
            out.append(Violation(2, (v,), f"vertex {v} colored but cell {graph.cell_of(v)} has no frequency"))

    counts: dict[tuple[int, int], list[int]] = defaultdict(list)
    for v, t in sorted(colored.items()):
        counts[(graph.cell_of(v), t)].append(v)
    for (c, t), members in sorted(counts.items()):
        if len(members) > params.k:
            out.append(Violation(3, tuple(members), f"cell {c} slot {t} holds {len(members)} > k={params.k}"))

    for (u, w), kind in graph.edges.items():
        if u not in colored or w not in colored:
            continue
        cu, cw = graph.cell_of(u), graph.cell_of(w)
        fu, fw = assignment.cell_first_color.get(cu), assignment.cell_first_color.get(cw)
        if (fu, colored[u]) == (fw, colored[w]):
            if cu == cw:
                out.append(Violation(3, (u, w), f"same-cell vertices {u},{w} out of carrier-sense reach share slot {colored[u]}"))
            else:
                out.append(Violation(4, (u, w), f"conflicting vertices {u},{w} share combination ({fu}, {colored[u]})"))
    return out


# ---------------------------------------------------------------------------
# experiments

SWEEP_COLUMNS = ("n", "cs_range_over_dmax", "trial", "colored", "total", "coverage")


@dataclass
class SweepReport:
    rows: list[tuple[int, float, int, int, int, float]]
    C_AP_1: int

    def summary(self) -> list[dict]:
        grouped: dict[tuple[int, float], list[float]] = defaultdict(list)
        for n, cs, _trial, _colored, _total, cov in self.rows:
            grouped[(n, cs)].append(cov)
        return [
            {
                "n": n,
                "cs_range_over_dmax": cs,
                "trials": len(covs),
                "mean": float(np.mean(covs)),
                "min": min(covs),
                "max": max(covs),
            }
            for (n, cs), covs in sorted(grouped.items())
        ]

    def mean(self, n: int, cs_range_over_dmax: float | None = None) -> float:
        covs = [r[5] for r in self.rows if r[0] == n and (cs_range_over_dmax is None or r[1] == cs_range_over_dmax)]
        if not covs:
            raise KeyError((n, cs_range_over_dmax))
        return float(np.mean(covs))


SECTOR = "sector"


def resolve_cs_factor(spec: float | str, n: int, c_ap_1: int) -> float:
    """Carrier-sense range as a multiple of d_max; ``"sector"`` picks the sector-diameter rule.

    The sector rule has columns n in {1, 2, 3, 4, 6} plus the pure-TDMA column
    ``n == C_AP_1`` (k = 1), which needs no carrier sensing and maps to 0.
    """
    if spec == SECTOR:
        return sector_cs_factor(n, c_ap_1)
    return float(spec)


def sector_cs_factor(n: int, c_ap_1: int) -> float:
    if n == c_ap_1:
        return 0.0
    if n == 12:
        # the n=12 sector entry is the k=1 column, only valid when C_AP_1 == 12
        raise UnsupportedSectorCount(f"no sector setting for n=12 with C_AP_1={c_ap_1}")
    return sector_cs_range(n, 1.0)


def cs_range_sweep(
    template: Topology,
    params: CoTDMAParams,
    n_values: Sequence[int],
    cs_range_values: Sequence[float | str],
    trials: int,
    seed: int,
    stations_per_cell: int | None = None,
    frequency_scheme: str | Mapping[int, int] = "three_channel",
) -> SweepReport:
    """Coverage of ``color`` over a grid of (n, CSRange) settings.

    ``cs_range_values`` are multiples of ``d_max`` (or ``"sector"``). Each
    trial draws a fresh placement from ``derive_seed(seed, trial)`` that is
    shared by every (n, CSRange) pair of that trial.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    per_cell = params.C_AP_1 if stations_per_cell is None else stations_per_cell
    d_max = template.radio.d_max
    rows = []
    for trial in range(trials):
        topo = build_topology(template.D, template.radio, per_cell, derive_seed(seed, trial))
        topo = assign_frequencies(topo, frequency_scheme)
        channels = cell_channels(topo)
        graphs: dict[float, ConflictGraph] = {}
        for n in n_values:
            p = CoTDMAParams(params.m, n, params.C_AP_1, params.frequency_plan)
            for spec in cs_range_values:
                factor = resolve_cs_factor(spec, n, params.C_AP_1)
                if factor not in graphs:
                    graphs[factor] = build_coloring_graph(topo, factor * d_max)
                res = color(graphs[factor], p, channels)
                rows.append((n, factor, trial, res.colored_count, res.total, res.coverage))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return SweepReport(rows, params.C_AP_1)


def assignment_json(graph: ConflictGraph, result: ColoringResult) -> str:
    return json.dumps(result.assignment.export(graph), sort_keys=True)
