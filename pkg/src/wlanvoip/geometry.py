"""Hexagonal multi-cell layouts, station placement and frequency plans.

Cells are pointy-top hexagons of side ``d_max`` laid out in an odd-row
offset grid: row ``r`` sits at ``y = 1.5 * d_max * r`` and odd rows are
shifted right by half a cell width. Edge-adjacent centers are therefore
``sqrt(3) * d_max`` apart.

All distances are meters (float64). Distances here are *virtual*: they stand
for received-power thresholds via ``P = kappa / d**alpha``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidMap, InvalidParameter, UnsupportedSectorCount

TOL = 1e-9
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class RadioParams:
    d_max: float = 250.0
    tx_range: float = 250.0
    cs_range: float = 550.0
    delta: float = 0.78
    path_loss_exponent: float = 4.0
    path_loss_constant: float = 1.0

    def validate(self) -> None:
        if not self.d_max > 0:
            raise InvalidParameter(f"d_max must be positive, got {self.d_max}")
        if self.cs_range < 0:
            raise InvalidParameter(f"cs_range must be >= 0, got {self.cs_range}")
        if not self.delta > -1:
            raise InvalidParameter(f"delta must be > -1, got {self.delta}")
        if not self.path_loss_exponent > 0:
            raise InvalidParameter("path_loss_exponent must be positive")
        if not self.path_loss_constant > 0:
            raise InvalidParameter("path_loss_constant must be positive")
        if self.tx_range < self.d_max - TOL:
            raise InvalidParameter(
                f"tx_range ({self.tx_range}) must cover the cell radius d_max ({self.d_max})"
            )


@dataclass(frozen=True)
class Cell:
    cell_id: int
    center: tuple[float, float]
    frequency_channel: int | None = None


@dataclass(frozen=True)
class Station:
    station_id: int
    position: tuple[float, float]
    cell_id: int
    link_length: float


@dataclass(frozen=True)
class Topology:
    D: int
    cells: tuple[Cell, ...]
    stations: tuple[Station, ...]
    radio: RadioParams = field(default_factory=RadioParams)
    rng_seed: int = 0

    def cell(self, cell_id: int) -> Cell:
        return self.cells[cell_id]

    def ap_position(self, cell_id: int) -> tuple[float, float]:
        return self.cells[cell_id].center

    def station_xy(self) -> np.ndarray:
        return np.array([s.position for s in self.stations], dtype=float).reshape(-1, 2)

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "radio": dataclasses.asdict(self.radio),
            "cells": [
                {"id": c.cell_id, "cx": c.center[0], "cy": c.center[1], "channel": c.frequency_channel}
                for c in self.cells
            ],
            "stations": [
                {"id": s.station_id, "x": s.position[0], "y": s.position[1], "cell": s.cell_id}
                for s in self.stations
            ],
            "seed": self.rng_seed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Topology":
        radio = RadioParams(**data["radio"])
        cells = tuple(
            Cell(int(c["id"]), (float(c["cx"]), float(c["cy"])), c.get("channel"))
            for c in data["cells"]
        )
        stations = []
        for s in data["stations"]:
            cx, cy = cells[int(s["cell"])].center
            x, y = float(s["x"]), float(s["y"])
            stations.append(Station(int(s["id"]), (x, y), int(s["cell"]), math.hypot(x - cx, y - cy)))
        return cls(int(data["D"]), cells, tuple(stations), radio, int(data["seed"]))

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# tiling


def cell_center(row: int, col: int, d_max: float) -> tuple[float, float]:
    return (SQRT3 * d_max * (col + 0.5 * (row & 1)), 1.5 * d_max * row)


def offset_to_axial(row: int, col: int) -> tuple[int, int]:
    """Odd-row offset (row, col) to axial hex coordinates (q, r)."""
    return col - (row - (row & 1)) // 2, row


def hexagon_vertices(center: Sequence[float], d_max: float) -> np.ndarray:
    angles = np.deg2rad(90.0 + 60.0 * np.arange(6))
    return np.column_stack([center[0] + d_max * np.cos(angles), center[1] + d_max * np.sin(angles)])


def in_hexagon(point: Sequence[float], center: Sequence[float], d_max: float, tol: float = TOL) -> bool:
    """Closed point-in-hexagon test for a pointy-top hexagon of side ``d_max``."""
    dx = abs(point[0] - center[0])
    dy = abs(point[1] - center[1])
    return dx <= SQRT3 / 2 * d_max + tol and dx / SQRT3 + dy <= d_max + tol


def locate_cell(point: Sequence[float], cells: Sequence[Cell], d_max: float) -> int | None:
    # a point on a shared edge belongs to the lowest cell_id containing it
    for c in cells:
        if in_hexagon(point, c.center, d_max):
            return c.cell_id
    return None


def cell_rng(seed: int, cell_id: int) -> np.random.Generator:
    """Per-cell substream so that adding cells leaves existing placements intact."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(cell_id,)))


def sample_in_hexagon(rng: np.random.Generator, center: Sequence[float], d_max: float, count: int) -> list[tuple[float, float]]:
    half_w = SQRT3 / 2 * d_max
    out: list[tuple[float, float]] = []
    while len(out) < count:
        x = rng.uniform(-half_w, half_w)
        y = rng.uniform(-d_max, d_max)
        if abs(x) / SQRT3 + abs(y) <= d_max:
            out.append((center[0] + x, center[1] + y))
    return out


def build_topology(D: int, radio: RadioParams | None = None, stations_per_cell: int = 0, seed: int = 0) -> Topology:
    """Build a D x D hexagonal grid and drop ``stations_per_cell`` uniform stations per cell.

    Station ids run cell by cell, so station ``i`` of cell ``c`` has id
    ``c * stations_per_cell + i``.
    """
    radio = radio or RadioParams()
    if D < 1:
        raise InvalidParameter(f"D must be >= 1, got {D}")
    if stations_per_cell < 0:
        raise InvalidParameter(f"stations_per_cell must be >= 0, got {stations_per_cell}")
    radio.validate()

    cells = tuple(
        Cell(row * D + col, cell_center(row, col, radio.d_max))
        for row in range(D)
        for col in range(D)
    )
    stations: list[Station] = []
    for c in cells:
        rng = cell_rng(seed, c.cell_id)
        for x, y in sample_in_hexagon(rng, c.center, radio.d_max, stations_per_cell):
            owner = locate_cell((x, y), cells, radio.d_max)
            assert owner is not None
            ox, oy = cells[owner].center
            stations.append(Station(len(stations), (x, y), owner, math.hypot(x - ox, y - oy)))
    return Topology(D, cells, tuple(stations), radio, int(seed))


# ---------------------------------------------------------------------------
# virtual distance and interference


def distance_to_power(radio: RadioParams, distance: float) -> float:
    return radio.path_loss_constant / distance**radio.path_loss_exponent


def virtual_distance(radio: RadioParams, power_received: float) -> float:
    """Invert ``P = kappa / d**alpha``."""
    if not power_received > 0:
        raise InvalidParameter(f"received power must be positive, got {power_received}")
    return (radio.path_loss_constant / power_received) ** (1.0 / radio.path_loss_exponent)


def interference_range(link_length, delta: float):
    """Radius around a receiver inside which a foreign transmission corrupts reception.

    Works on scalars and numpy arrays alike.
    """
    return (1.0 + delta) * link_length


# ---------------------------------------------------------------------------
# frequency plans

FREQUENCY_SCHEMES = ("single", "three_channel", "seven_channel")


def _channel_for(scheme: str, row: int, col: int) -> int:
    q, r = offset_to_axial(row, col)
    if scheme == "single":
        return 0
    if scheme == "three_channel":
        return (q - r) % 3
    if scheme == "seven_channel":
        return (q + 3 * r) % 7
    raise InvalidParameter(f"unknown frequency scheme {scheme!r}")


def assign_frequencies(topology: Topology, scheme: str | Mapping[int, int]) -> Topology:
    """Return a copy of ``topology`` with a channel set on every cell.

    ``scheme`` is one of ``single``, ``three_channel``, ``seven_channel`` or
    an explicit ``{cell_id: channel}`` map covering every cell.
    """
    D = topology.D
    if isinstance(scheme, str):
        channels = {c.cell_id: _channel_for(scheme, c.cell_id // D, c.cell_id % D) for c in topology.cells}
    else:
        channels = {int(k): int(v) for k, v in scheme.items()}
        missing = [c.cell_id for c in topology.cells if c.cell_id not in channels]
        if missing:
            raise InvalidMap(f"frequency map misses cells {missing}")
        negative = [k for k, v in channels.items() if v < 0]
        if negative:
            raise InvalidMap(f"negative channel for cells {negative}")
    cells = tuple(dataclasses.replace(c, frequency_channel=channels[c.cell_id]) for c in topology.cells)
    return dataclasses.replace(topology, cells=cells)


def hexagon_gap(center_a: Sequence[float], center_b: Sequence[float], d_max: float) -> float:
    """Minimum boundary-to-boundary distance between two disjoint hexagons."""
    va = hexagon_vertices(center_a, d_max)
    vb = hexagon_vertices(center_b, d_max)
    best = math.inf
    for poly_p, poly_q in ((va, vb), (vb, va)):
        for p in poly_p:
            for i in range(6):
                best = min(best, _point_segment_distance(p, poly_q[i], poly_q[(i + 1) % 6]))
    return best


def _point_segment_distance(p, a, b) -> float:
    ab = b - a
    t = float(np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


# ---------------------------------------------------------------------------
# sector carrier-sense ranges

_SECTOR_FACTORS = {
    1: 2.0,
    2: math.sqrt(13.0) / 2.0,
    3: math.sqrt(3.0),
    4: math.sqrt(7.0) / 2.0,
    6: 1.0,
    12: 0.0,
}
SECTOR_COUNTS = tuple(sorted(_SECTOR_FACTORS))


def sector_cs_range(n: int, d_max: float) -> float:
    """Carrier-sense range equal to the diameter of one of ``n`` equal cell sectors."""
    try:
        return _SECTOR_FACTORS[n] * d_max
    except KeyError:
        raise UnsupportedSectorCount(f"no sector layout for n={n}; supported: {SECTOR_COUNTS}") from None
