"""Switching-activity simulator for an output-stationary Bfloat16 systolic array.

Layers, bottom up: bf16 (bit-exact arithmetic), coding (bus-invert
encoder), systolic (the cycle-accurate array with toggle counters),
workload (manifests, tensors, tiling, synthetic layers), analysis
(histograms, power proxy, comparison reports), runner (file-level run
orchestration), service + cli (HTTP face and its thin client).
"""

from .analysis import (PUBLISHED_REFERENCE, FieldHistograms, PowerProxyConfig,
                       ProxyBreakdown, compare_report, field_histograms,
                       power_proxy, render_csv, zero_fraction)
from .coding import (DEFAULT_LAYOUT, BusState, SegmentLayout, bic_decode,
                     bic_encode, expected_uniform_toggles)
from .systolic import (ActivityCounters, ArrayConfig, TileSimulation,
                       inject_schedule, run_tile)
from .workload import (LayerSpec, Manifest, WorkloadError, load_manifest,
                       load_tensor, save_manifest, save_tensor, synth_layer,
                       tile_and_run)

__version__ = "0.1.0"

__all__ = [
    "PUBLISHED_REFERENCE", "FieldHistograms", "PowerProxyConfig",
    "ProxyBreakdown", "compare_report", "field_histograms", "power_proxy",
    "render_csv", "zero_fraction",
    "DEFAULT_LAYOUT", "BusState", "SegmentLayout", "bic_decode", "bic_encode",
    "expected_uniform_toggles",
    "ActivityCounters", "ArrayConfig", "TileSimulation", "inject_schedule",
    "run_tile",
    "LayerSpec", "Manifest", "WorkloadError", "load_manifest", "load_tensor",
    "save_manifest", "save_tensor", "synth_layer", "tile_and_run",
    "__version__",
]
