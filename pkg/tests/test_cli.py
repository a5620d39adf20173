"""CLI behavior: pipeline, exit codes, presets, output formats."""

import json

import pytest
from click.testing import CliRunner

from satoggle.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def synth_args(out_dir, seed=3):
    return ["synth", "--model-name", "m", "--seed", str(seed),
            "--out", str(out_dir),
            "--layer", "name=l0,kind=cnn-like,m=5,k=10,n=5,zero_fraction=0.4",
            "--layer", "name=l1,kind=uniform-mantissa-weights,m=4,k=6,n=4"]


def test_full_pipeline(runner, tmp_path):
    result = runner.invoke(main, synth_args(tmp_path / "model"))
    assert result.exit_code == 0, result.output
    manifest = str(tmp_path / "model" / "manifest.json")

    result = runner.invoke(main, [
        "simulate", "--manifest", manifest, "--out", str(tmp_path / "base"),
        "--rows", "4", "--cols", "4"])
    assert result.exit_code == 0, result.output
    assert "2 layers" in result.output

    result = runner.invoke(main, [
        "simulate", "--manifest", manifest, "--out", str(tmp_path / "prop"),
        "--rows", "4", "--cols", "4", "--preset", "powersave"])
    assert result.exit_code == 0, result.output
    config = json.loads((tmp_path / "prop" / "run.json").read_text())["config"]
    assert config["enable_bic"] is True and config["enable_zvcg"] is True

    result = runner.invoke(main, [
        "compare", "--baseline", str(tmp_path / "base"),
        "--proposed", str(tmp_path / "prop"), "--out", str(tmp_path / "cmp")])
    assert result.exit_code == 0, result.output
    assert "published results" in result.output
    assert (tmp_path / "cmp" / "compare.csv").exists()
    assert (tmp_path / "cmp" / "compare.json").exists()

    result = runner.invoke(main, [
        "analyze", "--manifest", manifest, "--out", str(tmp_path / "stats")])
    assert result.exit_code == 0, result.output


def test_simulate_requires_exactly_one_source(runner, tmp_path):
    result = runner.invoke(main, ["simulate", "--out", str(tmp_path / "o")])
    assert result.exit_code == 2
    result = runner.invoke(main, [
        "simulate", "--manifest", "a.json", "--synth-spec", "b.json",
        "--out", str(tmp_path / "o")])
    assert result.exit_code == 2


def test_simulate_synth_spec_inline(runner, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "model_name": "inline", "layers": [
            {"name": "only", "kind": "zero-fraction-inputs", "m": 4, "k": 8,
             "n": 4, "zero_fraction": 0.5}]}))
    result = runner.invoke(main, [
        "simulate", "--synth-spec", str(spec), "--out", str(tmp_path / "run"),
        "--rows", "4", "--cols", "4", "--seed", "12", "--zvcg"])
    assert result.exit_code == 0, result.output
    summary = json.loads((tmp_path / "run" / "run.json").read_text())
    assert summary["model_name"] == "inline"
    assert summary["totals"]["macs_skipped"] > 0
    assert (tmp_path / "run" / "synth" / "manifest.json").exists()


def test_bad_flags_exit_2_write_nothing(runner, tmp_path):
    out = tmp_path / "never"
    result = runner.invoke(main, [
        "simulate", "--manifest", "whatever.json", "--out", str(out),
        "--segments", "0:99"])
    assert result.exit_code == 2
    assert not out.exists()
    result = runner.invoke(main, [
        "simulate", "--manifest", "whatever.json", "--out", str(out),
        "--rows", "0"])
    assert result.exit_code == 2
    assert not out.exists()


def test_missing_manifest_exit_3(runner, tmp_path):
    result = runner.invoke(main, [
        "simulate", "--manifest", str(tmp_path / "absent.json"),
        "--out", str(tmp_path / "o")])
    assert result.exit_code == 3
    assert "error" in result.output


def test_missing_compare_dirs_exit_3(runner, tmp_path):
    result = runner.invoke(main, [
        "compare", "--baseline", str(tmp_path / "a"),
        "--proposed", str(tmp_path / "b"), "--out", str(tmp_path / "c")])
    assert result.exit_code == 3


def test_bad_layer_option_exit_2(runner, tmp_path):
    result = runner.invoke(main, [
        "synth", "--model-name", "m", "--out", str(tmp_path),
        "--layer", "name=x,kind=cnn-like,m=2"])
    assert result.exit_code == 2
    result = runner.invoke(main, [
        "synth", "--model-name", "m", "--out", str(tmp_path),
        "--layer", "name=x,kind=cnn-like,m=2,k=2,n=2,bogus=1"])
    assert result.exit_code == 2


def test_compare_format_csv_only(runner, tmp_path):
    runner.invoke(main, synth_args(tmp_path / "model"))
    manifest = str(tmp_path / "model" / "manifest.json")
    runner.invoke(main, ["simulate", "--manifest", manifest,
                         "--out", str(tmp_path / "r"), "--rows", "4",
                         "--cols", "4"])
    result = runner.invoke(main, [
        "compare", "--baseline", str(tmp_path / "r"),
        "--proposed", str(tmp_path / "r"), "--out", str(tmp_path / "c"),
        "--format", "csv"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "c" / "compare.csv").exists()
    assert not (tmp_path / "c" / "compare.json").exists()


def test_cli_deterministic_reports(runner, tmp_path):
    for sub in ("m1", "m2"):
        runner.invoke(main, synth_args(tmp_path / sub, seed=77))
        runner.invoke(main, [
            "simulate", "--manifest", str(tmp_path / sub / "manifest.json"),
            "--out", str(tmp_path / sub / "run"), "--rows", "4", "--cols", "4",
            "--preset", "powersave"])
    for name in ("run.json", "l0.counters.json", "l0.output.bin"):
        assert (tmp_path / "m1" / "run" / name).read_bytes() == \
            (tmp_path / "m2" / "run" / name).read_bytes()
    assert (tmp_path / "m1" / "manifest.json").read_bytes() == \
        (tmp_path / "m2" / "manifest.json").read_bytes()
