"""Histogram, power-proxy, and comparison-report checks."""

import numpy as np
import pytest

from satoggle.analysis import (CSV_HEADER, PUBLISHED_REFERENCE,
                               PowerProxyConfig, compare_report,
                               field_histograms, power_proxy, render_csv,
                               zero_fraction)
from satoggle.systolic import ActivityCounters


def test_field_histograms_known_tensor():
    t = np.array([0x0000, 0x8000, 0x3F80, 0x3F81, 0xBF81], np.uint16)
    h = field_histograms(t)
    assert h.total == 5
    assert h.sign.tolist()[0] == 3 and h.sign.tolist()[1] == 2
    assert h.exponent[0x7F] == 3  # the three 1.0-ish values
    assert h.exponent[0x00] == 2  # both zeros
    assert h.mantissa[0x00] == 3 and h.mantissa[0x01] == 2
    assert h.sign.sum() == h.exponent.sum() == h.mantissa.sum() == 5


def test_field_histograms_empty():
    h = field_histograms(np.zeros((0,), np.uint16))
    assert h.total == 0 and h.exponent.sum() == 0


def test_zero_fraction_cases():
    assert zero_fraction(np.zeros((3, 3), np.uint16)) == 1.0
    assert zero_fraction(np.full((2, 2), 0x3F80, np.uint16)) == 0.0
    assert zero_fraction(np.zeros((0,), np.uint16)) == 0.0
    assert zero_fraction(np.array([0x8000, 0x3F80], np.uint16)) == 0.5  # -0 is zero


def test_proxy_config_validation():
    cfg = PowerProxyConfig()
    assert cfg.e_mac == 40.0 and cfg.w_input_reg == 1.0
    with pytest.raises(ValueError):
        PowerProxyConfig(e_mac=-1.0)
    with pytest.raises(ValueError):
        PowerProxyConfig.from_dict({"e_mac": 10.0, "bogus": 1.0})
    assert PowerProxyConfig.from_dict({"e_mac": 10.0}).e_mac == 10.0


def test_power_proxy_decomposition():
    counters = ActivityCounters(
        input_reg_toggles=10, weight_reg_toggles=20, weight_mant_toggles=20,
        inv_bit_toggles=3, iszero_bit_toggles=2, acc_toggles=7,
        unload_toggles=5, macs_performed=4, cycles=9)
    p = power_proxy(counters)
    assert p.streaming == 10 + 20 + 3 + 2
    assert p.compute == 40.0 * 4 + 7
    assert p.unload == 5
    assert p.total == p.streaming + p.compute + p.unload


def test_power_proxy_zero_counters():
    p = power_proxy(ActivityCounters())
    assert p.total == 0.0


def test_power_proxy_weight_scaling():
    counters = ActivityCounters(input_reg_toggles=100)
    assert power_proxy(counters, PowerProxyConfig(w_input_reg=2.5)).streaming == 250.0


def _layer_entry(name, counters, m=4, k=4, n=4, zero_frac=0.25):
    return {"name": name, "m": m, "k": k, "n": n, "zero_frac": zero_frac,
            "counters": counters.as_dict()}


def test_compare_report_reductions():
    base = ActivityCounters(input_reg_toggles=200, weight_reg_toggles=100,
                            weight_mant_toggles=100, macs_performed=64,
                            acc_toggles=50, unload_toggles=10, cycles=30)
    prop = ActivityCounters(input_reg_toggles=100, weight_reg_toggles=80,
                            weight_mant_toggles=80, inv_bit_toggles=20,
                            iszero_bit_toggles=10, macs_performed=48,
                            macs_skipped=16, acc_toggles=50,
                            unload_toggles=10, cycles=30)
    report = compare_report([_layer_entry("l0", base)], [_layer_entry("l0", prop)])
    row = report["rows"][0]
    assert row["base_proxy"]["streaming"] == 300.0
    assert row["prop_proxy"]["streaming"] == 210.0
    assert row["stream_red_pct"] == pytest.approx(30.0)
    base_total = 300.0 + 64 * 40 + 50 + 10
    prop_total = 210.0 + 48 * 40 + 50 + 10
    assert row["total_red_pct"] == pytest.approx(
        100.0 * (base_total - prop_total) / base_total)
    assert report["overall"]["stream_red_pct"] == pytest.approx(30.0)
    assert report["reference_points"] == PUBLISHED_REFERENCE
    assert report["proxy_config"]["e_mac"] == 40.0


def test_compare_report_pairing_errors():
    base = [_layer_entry("l0", ActivityCounters())]
    with pytest.raises(ValueError, match="missing"):
        compare_report(base, [_layer_entry("other", ActivityCounters())])
    with pytest.raises(ValueError, match="dimension"):
        compare_report(base, [_layer_entry("l0", ActivityCounters(), m=8)])
    two = [_layer_entry("l0", ActivityCounters()),
           _layer_entry("l0", ActivityCounters())]
    with pytest.raises(ValueError, match="duplicate"):
        compare_report(base, two)


def test_render_csv_exact_header_and_shape():
    base = [_layer_entry("l0", ActivityCounters(input_reg_toggles=10,
                                                macs_performed=1, cycles=2))]
    prop = [_layer_entry("l0", ActivityCounters(input_reg_toggles=5,
                                                macs_performed=1, cycles=2))]
    text = render_csv(compare_report(base, prop))
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert lines[0] == ("layer,m,k,n,zero_frac,base_stream,prop_stream,"
                        "stream_red_pct,base_total,prop_total,total_red_pct")
    assert len(lines) == 3  # header, one layer, overall
    assert lines[1].startswith("l0,4,4,4,")
    assert lines[2].startswith("OVERALL,")
    fields = lines[1].split(",")
    assert float(fields[5]) == 10.0 and float(fields[6]) == 5.0
    assert float(fields[7]) == pytest.approx(50.0)


def test_zero_baseline_reduction_defined():
    # All-zero baseline proxies report 0% reduction rather than dividing by zero.
    report = compare_report([_layer_entry("l0", ActivityCounters())],
                            [_layer_entry("l0", ActivityCounters())])
    assert report["rows"][0]["total_red_pct"] == 0.0
