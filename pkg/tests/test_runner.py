"""File-level orchestration: simulate/analyze/synth/compare run directories."""

import json

import pytest

from satoggle.runner import (SimulateRequest, SynthLayerRequest, SynthRequest,
                             analyze, compare, simulate, synthesize,
                             worker_count)
from satoggle.workload import WorkloadError


@pytest.fixture()
def synth_model(tmp_path):
    result = synthesize(SynthRequest(
        model_name="demo", seed=5, out_dir=str(tmp_path / "model"),
        layers=(SynthLayerRequest(name="fc0", kind="cnn-like", m=6, k=20, n=6,
                                  zero_fraction=0.4),
                SynthLayerRequest(name="fc1", kind="uniform-mantissa-weights",
                                  m=6, k=9, n=4))))
    return result["manifest"]


def test_simulate_writes_everything(tmp_path, synth_model):
    out = tmp_path / "run"
    summary = simulate(SimulateRequest(manifest_path=synth_model,
                                       out_dir=str(out), rows=4, cols=4))
    assert (out / "run.json").exists()
    for name in ("fc0", "fc1"):
        assert (out / f"{name}.counters.json").exists()
        assert (out / f"{name}.output.bin").exists()
    assert (out / "fc0.output.bin").stat().st_size == 6 * 6 * 2
    assert summary["model_name"] == "demo"
    on_disk = json.loads((out / "run.json").read_text())
    assert on_disk == summary
    totals = summary["totals"]
    layer_sum = sum(entry["counters"]["macs_performed"] +
                    entry["counters"]["macs_skipped"]
                    for entry in summary["layers"])
    assert totals["macs_performed"] + totals["macs_skipped"] == layer_sum
    assert layer_sum == 6 * 20 * 6 + 6 * 9 * 4
    assert summary["layers"][0]["zero_frac"] == pytest.approx(0.4, abs=0.1)


def test_simulate_deterministic_bytes(tmp_path, synth_model):
    req1 = SimulateRequest(manifest_path=synth_model, out_dir=str(tmp_path / "r1"),
                           rows=4, cols=4, enable_bic=True, enable_zvcg=True)
    req2 = SimulateRequest(manifest_path=synth_model, out_dir=str(tmp_path / "r2"),
                           rows=4, cols=4, enable_bic=True, enable_zvcg=True)
    simulate(req1)
    simulate(req2)
    for name in ("run.json", "fc0.counters.json", "fc0.output.bin",
                 "fc1.output.bin"):
        assert (tmp_path / "r1" / name).read_bytes() == \
            (tmp_path / "r2" / name).read_bytes()


def test_simulate_bad_segments_writes_nothing(tmp_path, synth_model):
    out = tmp_path / "run"
    with pytest.raises(ValueError):
        simulate(SimulateRequest(manifest_path=synth_model, out_dir=str(out),
                                 segments="0:99"))
    assert not out.exists()


def test_simulate_missing_manifest(tmp_path):
    with pytest.raises(WorkloadError):
        simulate(SimulateRequest(manifest_path=str(tmp_path / "nope.json"),
                                 out_dir=str(tmp_path / "out")))


def test_analyze_outputs(tmp_path, synth_model):
    out = tmp_path / "stats"
    summary = analyze(synth_model, str(out))
    assert (out / "analysis.json").exists()
    assert (out / "fc0.stats.json").exists()
    entry = summary["layers"][0]
    assert entry["inputs"]["zero_frac"] == pytest.approx(0.4, abs=0.1)
    hist = entry["weights"]["histograms"]
    assert sum(hist["exponent"]) == 20 * 6


def test_compare_end_to_end(tmp_path, synth_model):
    base_dir, prop_dir = tmp_path / "base", tmp_path / "prop"
    simulate(SimulateRequest(manifest_path=synth_model, out_dir=str(base_dir),
                             rows=4, cols=4))
    simulate(SimulateRequest(manifest_path=synth_model, out_dir=str(prop_dir),
                             rows=4, cols=4, enable_bic=True, enable_zvcg=True))
    report = compare(str(base_dir), str(prop_dir), str(tmp_path / "cmp"))
    assert (tmp_path / "cmp" / "compare.csv").exists()
    assert (tmp_path / "cmp" / "compare.json").exists()
    assert len(report["rows"]) == 2
    assert report["baseline_config"]["enable_bic"] is False
    assert report["proposed_config"]["enable_bic"] is True
    # both runs computed the same outputs
    assert (base_dir / "fc0.output.bin").read_bytes() == \
        (prop_dir / "fc0.output.bin").read_bytes()


def test_compare_csv_only(tmp_path, synth_model):
    base_dir = tmp_path / "b"
    simulate(SimulateRequest(manifest_path=synth_model, out_dir=str(base_dir),
                             rows=4, cols=4))
    report = compare(str(base_dir), str(base_dir), str(tmp_path / "c"),
                     formats=("csv",))
    assert report["written"] == [str(tmp_path / "c" / "compare.csv")]
    assert not (tmp_path / "c" / "compare.json").exists()
    assert report["overall"]["total_red_pct"] == 0.0  # run against itself


def test_compare_missing_run(tmp_path):
    with pytest.raises(WorkloadError):
        compare(str(tmp_path / "a"), str(tmp_path / "b"), str(tmp_path / "c"))


def test_synthesize_needs_layers(tmp_path):
    with pytest.raises(WorkloadError):
        synthesize(SynthRequest(model_name="x", seed=0,
                                out_dir=str(tmp_path), layers=()))


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("SA_TOGGLE_THREADS", raising=False)
    default = worker_count()
    assert 1 <= default <= 4
    monkeypatch.setenv("SA_TOGGLE_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("SA_TOGGLE_THREADS", "nope")
    with pytest.raises(WorkloadError):
        worker_count()
