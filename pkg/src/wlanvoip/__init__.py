"""VoIP capacity planning for multi-cell 802.11 WLANs.

Conflict graphs over hexagonal multi-cell topologies, clique-analytical call
admission, CoTDMA frequency/time-slot coloring and the closed-form capacity
arithmetic that goes with them.
"""

__version__ = "0.1.0"

from .admission import AdmissionState, admit, max_clique_size_at, no_redundancy, run_admission_stream
from .capacity import cotdma_capacity, codec_profile, min_frames, packet_budget, per_ap_capacity
from .coloring import CoTDMAParams, color, cs_range_sweep, k_per_slot, validate_assignment
from .conflict import build_admission_graph, build_coloring_graph, conflict_test
from .geometry import (
    RadioParams,
    Topology,
    assign_frequencies,
    build_topology,
    interference_range,
    sector_cs_range,
    virtual_distance,
)

__all__ = [
    "AdmissionState",
    "CoTDMAParams",
    "RadioParams",
    "Topology",
    "admit",
    "assign_frequencies",
    "build_admission_graph",
    "build_coloring_graph",
    "build_topology",
    "codec_profile",
    "color",
    "conflict_test",
    "cotdma_capacity",
    "cs_range_sweep",
    "interference_range",
    "k_per_slot",
    "max_clique_size_at",
    "min_frames",
    "no_redundancy",
    "packet_budget",
    "per_ap_capacity",
    "run_admission_stream",
    "sector_cs_range",
    "validate_assignment",
    "virtual_distance",
]
