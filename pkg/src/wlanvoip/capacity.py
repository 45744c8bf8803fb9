"""Closed-form VoIP capacity arithmetic for multi-cell and CoTDMA WLANs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import InfeasibleBudget, InvalidParameter, SlotTooSmall

HEADER_BYTES = 40  # IP/UDP/RTP
DEFAULT_LOSS_ALLOWANCE = 0.03
BEACON_SEPARATION_MS = 100.0

# single-cell capacities (sessions per isolated AP)
C_AP_1_PRESETS = {
    "11b": 12,
    "11g": 60,
    "11g_measured": 55,
    "11b_pcf": 17,
    "11g_pcf": 90,
}
C_MAX_DEFAULTS = {"11b": 8, "11g": 44}


@dataclass(frozen=True)
class CodecProfile:
    name: str
    payload_bytes: int
    packets_per_second: float
    loss_allowance: float = DEFAULT_LOSS_ALLOWANCE

    @property
    def one_way_rate(self) -> float:
        """kbps needed for one direction, headers included."""
        return (self.payload_bytes + HEADER_BYTES) * 8 * self.packets_per_second / 1000

    @property
    def loss_adjusted_rate(self) -> float:
        """kbps a direction must sustain when ``loss_allowance`` of packets may be lost."""
        return self.one_way_rate * (1 - self.loss_allowance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(one_way_rate=self.one_way_rate, loss_adjusted_rate=self.loss_adjusted_rate)
        return d


def codec_profile(name: str = "gsm_6_10", payload_bytes: int | None = None, packets_per_second: float | None = None) -> CodecProfile:
    if name == "gsm_6_10":
        return CodecProfile("gsm_6_10", 33, 50)
    if name == "custom":
        if payload_bytes is None or packets_per_second is None:
            raise InvalidParameter("custom codec needs payload_bytes and packets_per_second")
        if payload_bytes <= 0 or packets_per_second <= 0:
            raise InvalidParameter("custom codec payload and rate must be positive")
        return CodecProfile("custom", payload_bytes, packets_per_second)
    raise InvalidParameter(f"unknown codec {name!r}")


@dataclass(frozen=True)
class TimingParams:
    """Beacon-interval layout: ``frames`` frames of ``slots`` slots each.

    Durations are in milliseconds.
    """

    frames: int = 4
    slots: int = 3
    beacon_interval: float = 99.5
    beacon_duration: float = 0.5
    delay_budget: float = 30.0

    def __post_init__(self):
        if self.frames < 1 or self.slots < 1:
            raise InvalidParameter("frames and slots must be >= 1")
        if self.beacon_interval <= 0 or self.beacon_duration < 0 or self.delay_budget <= 0:
            raise InvalidParameter("durations must be positive")

    @property
    def frame_duration(self) -> float:
        return self.beacon_interval / self.frames

    @property
    def slot_duration(self) -> float:
        return self.frame_duration / self.slots

    @property
    def worst_case_delay(self) -> float:
        return self.frame_duration + self.beacon_duration

    @property
    def delay_ok(self) -> bool:
        return self.worst_case_delay <= self.delay_budget + 1e-12


def per_ap_capacity(total_sessions: float, D: int) -> float:
    if D < 1:
        raise InvalidParameter(f"D must be >= 1, got {D}")
    return total_sessions / D**2


def packet_budget(
    packets_per_second: float,
    n: int,
    frames: int,
    c_ap_1: int,
    beacon_separation_ms: float = BEACON_SEPARATION_MS,
) -> float:
    """Max VoIP packets (both directions, all active sessions) per time slot.

    Every session sends one packet per direction per frame, and ``c_ap_1``
    sessions share ``n`` slots per frame over one beacon separation.
    """
    if n < 1 or frames < 1:
        raise InvalidParameter("n and frames must be >= 1")
    # keep everything integral until the final division so 10, 50, ... come out exact
    return 2 * packets_per_second * c_ap_1 * beacon_separation_ms / (1000 * n * frames)


def slot_efficiency(r_delta_t: float) -> float:
    """Share of a slot left after one packet-length guard time."""
    if r_delta_t < 1:
        raise SlotTooSmall(f"slot holds {r_delta_t:g} packets, cannot fit the guard time")
    return (r_delta_t - 1) / r_delta_t


def min_frames(beacon_interval: float, delay_budget: float, beacon_duration: float) -> int:
    """Smallest frame count whose worst-case delay fits the delay budget."""
    slack = delay_budget - beacon_duration
    if slack <= 0:
        raise InfeasibleBudget(f"delay budget {delay_budget} ms does not exceed beacon duration {beacon_duration} ms")
    c = math.ceil(beacon_interval / slack)
    # guard against ceil landing one high on representation error
    if c > 1 and (c - 1) * slack >= beacon_interval:
        c -= 1
    return max(c, 1)


@dataclass(frozen=True)
class CapacityResult:
    r_delta_t: float
    efficiency: float
    sessions_per_ap: int


def cotdma_capacity(codec: CodecProfile, timing: TimingParams, c_ap_1: int) -> CapacityResult:
    r = packet_budget(codec.packets_per_second, timing.slots, timing.frames, c_ap_1)
    eff = slot_efficiency(r)
    # floor with a hair of slack so 12 * 0.9 style products are not floored a unit low
    sessions = math.floor(c_ap_1 * eff + 1e-9)
    return CapacityResult(r, eff, sessions)


def capacity_report(codec: CodecProfile, timing: TimingParams, c_ap_1: int) -> dict:
    res = cotdma_capacity(codec, timing, c_ap_1)
    return {
        "codec": codec.to_dict(),
        "n": timing.slots,
        "C": timing.frames,
        "C_AP_1": c_ap_1,
        "r_delta_t": res.r_delta_t,
        "efficiency": res.efficiency,
        "sessions_per_ap": res.sessions_per_ap,
        "constraints": {
            "min_frames": min_frames(timing.beacon_interval, timing.delay_budget, timing.beacon_duration),
            "delay_ok": timing.delay_ok,
        },
    }
