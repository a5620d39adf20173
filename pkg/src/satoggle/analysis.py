"""Turn counters and tensors into numbers someone can read.

The power proxy is a weighted sum of switching counts, not a power model:
every toggle category gets a per-toggle weight and each performed MAC a
fixed energy constant, so feature comparisons report relative movement in
a dimensionless unit.  Raw counts always travel with the derived numbers.

The comparison report sets measured desk-scale reductions next to the
published results for the hardware implementation this simulator models;
those reference points came from a silicon evaluation of real CNNs, so
they calibrate expectations rather than serve as pass thresholds.
"""

from __future__ import annotations

import io
from dataclasses import asdict, dataclass

import numpy as np

from .systolic import ActivityCounters

# Published results for the hardware this simulator models: average
# switching-activity reduction on weight registers, per-layer total power
# reduction range, and whole-network totals for two reference CNNs.
PUBLISHED_REFERENCE = {
    "switching_activity_reduction_avg_pct": 29.0,
    "per_layer_power_reduction_range_pct": [1.0, 19.0],
    "resnet50_total_power_reduction_pct": 9.4,
    "mobilenet_total_power_reduction_pct": 6.2,
}

CSV_HEADER = ("layer,m,k,n,zero_frac,base_stream,prop_stream,stream_red_pct,"
              "base_total,prop_total,total_red_pct")


@dataclass
class FieldHistograms:
    """Per-field bit-pattern counts over a bf16 tensor."""

    sign: np.ndarray  # 2 bins
    exponent: np.ndarray  # 256 bins
    mantissa: np.ndarray  # 128 bins
    total: int

    def as_dict(self) -> dict:
        return {"sign": self.sign.tolist(), "exponent": self.exponent.tolist(),
                "mantissa": self.mantissa.tolist(), "total": self.total}


def field_histograms(tensor: np.ndarray) -> FieldHistograms:
    w = np.asarray(tensor, dtype=np.uint16).ravel()
    return FieldHistograms(
        sign=np.bincount(w >> 15, minlength=2).astype(np.int64),
        exponent=np.bincount((w >> 7) & 0xFF, minlength=256).astype(np.int64),
        mantissa=np.bincount(w & 0x7F, minlength=128).astype(np.int64),
        total=int(w.size),
    )


def zero_fraction(tensor: np.ndarray) -> float:
    """Fraction of entries that are zero (either sign); 0.0 for an empty tensor."""
    w = np.asarray(tensor, dtype=np.uint16)
    if w.size == 0:
        return 0.0
    return float(np.count_nonzero((w & 0x7FFF) == 0) / w.size)


@dataclass(frozen=True)
class PowerProxyConfig:
    """Per-toggle weights and the MAC energy constant (dimensionless units)."""

    w_input_reg: float = 1.0
    w_weight_reg: float = 1.0
    w_inv_bit: float = 1.0
    w_iszero_bit: float = 1.0
    w_acc: float = 1.0
    w_unload: float = 1.0
    e_mac: float = 40.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "PowerProxyConfig":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown proxy fields: {sorted(bad)}")
        return cls(**d)


@dataclass
class ProxyBreakdown:
    streaming: float
    compute: float
    unload: float
    total: float

    def as_dict(self) -> dict:
        return {"streaming": self.streaming, "compute": self.compute,
                "unload": self.unload, "total": self.total}


def power_proxy(counters: ActivityCounters,
                cfg: PowerProxyConfig = PowerProxyConfig()) -> ProxyBreakdown:
    """Weighted toggle sums split into streaming, compute, unload components."""
    streaming = (cfg.w_input_reg * counters.input_reg_toggles
                 + cfg.w_weight_reg * counters.weight_reg_toggles
                 + cfg.w_inv_bit * counters.inv_bit_toggles
                 + cfg.w_iszero_bit * counters.iszero_bit_toggles)
    compute = (cfg.e_mac * counters.macs_performed
               + cfg.w_acc * counters.acc_toggles)
    unload = cfg.w_unload * counters.unload_toggles
    return ProxyBreakdown(streaming=streaming, compute=compute,
                          unload=unload, total=streaming + compute + unload)


def _pct_reduction(base: float, prop: float) -> float:
    if base == 0.0:
        return 0.0
    return 100.0 * (base - prop) / base


def compare_report(base_layers: list[dict], prop_layers: list[dict],
                   proxy_cfg: PowerProxyConfig = PowerProxyConfig()) -> dict:
    """Build the feature-comparison report from two simulate summaries.

    Each argument is the layers list of a run summary (run.json).  Layers
    pair by name and must agree on dimensions.  Returns a JSON-ready dict;
    render_csv turns the same dict into the CSV table.
    """
    by_name = {layer["name"]: layer for layer in prop_layers}
    if len(by_name) != len(prop_layers):
        raise ValueError("duplicate layer names in proposed run")
    rows = []
    base_totals = ActivityCounters()
    prop_totals = ActivityCounters()
    zero_weighted = 0.0
    total_elems = 0
    for base_entry in base_layers:
        name = base_entry["name"]
        if name not in by_name:
            raise ValueError(f"layer {name!r} missing from proposed run")
        prop_entry = by_name[name]
        for dim in ("m", "k", "n"):
            if base_entry[dim] != prop_entry[dim]:
                raise ValueError(f"layer {name!r} dimension {dim} differs between runs")
        base_c = ActivityCounters.from_dict(base_entry["counters"])
        prop_c = ActivityCounters.from_dict(prop_entry["counters"])
        base_totals += base_c
        prop_totals += prop_c
        base_p = power_proxy(base_c, proxy_cfg)
        prop_p = power_proxy(prop_c, proxy_cfg)
        elems = base_entry["m"] * base_entry["k"]
        zero_weighted += base_entry["zero_frac"] * elems
        total_elems += elems
        rows.append({
            "layer": name,
            "m": base_entry["m"], "k": base_entry["k"], "n": base_entry["n"],
            "zero_frac": base_entry["zero_frac"],
            "base_counters": base_c.as_dict(),
            "prop_counters": prop_c.as_dict(),
            "base_proxy": base_p.as_dict(),
            "prop_proxy": prop_p.as_dict(),
            "stream_red_pct": _pct_reduction(base_p.streaming, prop_p.streaming),
            "compute_red_pct": _pct_reduction(base_p.compute, prop_p.compute),
            "unload_red_pct": _pct_reduction(base_p.unload, prop_p.unload),
            "total_red_pct": _pct_reduction(base_p.total, prop_p.total),
        })
    base_p = power_proxy(base_totals, proxy_cfg)
    prop_p = power_proxy(prop_totals, proxy_cfg)
    overall = {
        "layer": "OVERALL",
        "zero_frac": (zero_weighted / total_elems) if total_elems else 0.0,
        "base_counters": base_totals.as_dict(),
        "prop_counters": prop_totals.as_dict(),
        "base_proxy": base_p.as_dict(),
        "prop_proxy": prop_p.as_dict(),
        "stream_red_pct": _pct_reduction(base_p.streaming, prop_p.streaming),
        "compute_red_pct": _pct_reduction(base_p.compute, prop_p.compute),
        "unload_red_pct": _pct_reduction(base_p.unload, prop_p.unload),
        "total_red_pct": _pct_reduction(base_p.total, prop_p.total),
    }
    return {
        "proxy_config": asdict(proxy_cfg),
        "rows": rows,
        "overall": overall,
        "reference_points": dict(PUBLISHED_REFERENCE),
        "note": ("reference_points are published results for the hardware "
                 "implementation this simulator models; measured numbers are "
                 "desk-scale analogues, not reproductions"),
    }


def render_csv(report: dict) -> str:
    """Fixed-column CSV of a compare_report dict, overall row last."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row in report["rows"] + [report["overall"]]:
        buf.write(",".join([
            str(row["layer"]),
            str(row.get("m", "")), str(row.get("k", "")), str(row.get("n", "")),
            f"{row['zero_frac']:.6f}",
            f"{row['base_proxy']['streaming']:.1f}",
            f"{row['prop_proxy']['streaming']:.1f}",
            f"{row['stream_red_pct']:.3f}",
            f"{row['base_proxy']['total']:.1f}",
            f"{row['prop_proxy']['total']:.1f}",
            f"{row['total_red_pct']:.3f}",
        ]) + "\n")
    return buf.getvalue()
