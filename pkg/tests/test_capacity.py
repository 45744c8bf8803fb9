import pytest
from hypothesis import given, strategies as st

from wlanvoip.capacity import (
    C_AP_1_PRESETS,
    TimingParams,
    codec_profile,
    cotdma_capacity,
    capacity_report,
    min_frames,
    packet_budget,
    per_ap_capacity,
    slot_efficiency,
)
from wlanvoip.errors import InfeasibleBudget, InvalidParameter, SlotTooSmall


def test_gsm_rate():
    codec = codec_profile()
    assert codec.one_way_rate == 29.2
    assert codec.loss_adjusted_rate == pytest.approx(29.2 * 0.97)


def test_custom_codec():
    codec = codec_profile("custom", payload_bytes=160, packets_per_second=50)
    assert codec.one_way_rate == pytest.approx(80.0)
    with pytest.raises(InvalidParameter):
        codec_profile("custom", payload_bytes=160)
    with pytest.raises(InvalidParameter):
        codec_profile("g711")


def test_packet_budget_11b():
    assert packet_budget(50, 3, 4, 12) == 10
    assert slot_efficiency(10) == pytest.approx(0.9)


def test_packet_budget_11g():
    assert packet_budget(50, 3, 4, 60) == 50
    assert slot_efficiency(50) == pytest.approx(0.98)


def test_packet_budget_six_slots():
    assert packet_budget(50, 6, 4, 12) == 5


def test_cotdma_sessions():
    timing = TimingParams(frames=4, slots=3)
    assert cotdma_capacity(codec_profile(), timing, 12).sessions_per_ap == 10
    assert cotdma_capacity(codec_profile(), timing, 60).sessions_per_ap == 58


def test_slot_too_small():
    with pytest.raises(SlotTooSmall):
        slot_efficiency(0.5)


def test_min_frames():
    assert min_frames(99.5, 30, 0.5) == 4
    assert min_frames(99.5, 200, 0.5) == 1
    assert min_frames(99.5, 20, 0.5) == 6
    with pytest.raises(InfeasibleBudget):
        min_frames(99.5, 0.5, 0.5)


@given(st.floats(1, 1000), st.floats(1, 100), st.floats(0, 0.9))
def test_min_frames_is_smallest_fitting(bi, budget, beacon):
    c = min_frames(bi, budget, beacon)
    assert bi / c + beacon <= budget + 1e-9
    if c > 1:
        assert bi / (c - 1) + beacon > budget - 1e-9


def test_worst_case_delay():
    t = TimingParams(frames=4)
    assert t.worst_case_delay == pytest.approx(25.375)
    assert t.delay_ok
    assert not TimingParams(frames=3).delay_ok


def test_per_ap_capacity():
    assert per_ap_capacity(40.8, 5) == pytest.approx(1.632, abs=1e-12)
    assert per_ap_capacity(62.0, 5) == pytest.approx(2.48)
    with pytest.raises(InvalidParameter):
        per_ap_capacity(1, 0)


def test_presets():
    assert C_AP_1_PRESETS["11b"] == 12
    assert C_AP_1_PRESETS["11g"] == 60


def test_capacity_report_shape():
    rep = capacity_report(codec_profile(), TimingParams(), 12)
    assert rep["r_delta_t"] == 10
    assert rep["sessions_per_ap"] == 10
    assert rep["constraints"] == {"min_frames": 4, "delay_ok": True}


@given(st.integers(1, 12), st.integers(1, 8), st.integers(1, 120))
def test_sessions_never_exceed_single_cell_capacity(n, frames, c_ap_1):
    r = packet_budget(50, n, frames, c_ap_1)
    if r >= 1:
        res = cotdma_capacity(codec_profile(), TimingParams(frames=frames, slots=n), c_ap_1)
        assert 0 <= res.sessions_per_ap <= c_ap_1
