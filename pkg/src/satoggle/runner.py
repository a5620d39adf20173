"""Run orchestration: simulate, analyze, synthesize, compare, on disk.

A simulate run writes one directory: run.json (config echo, per-layer
counters, totals) plus <layer>.counters.json and <layer>.output.bin per
layer.  Layers are independent, so they run on a small thread pool; the
SA_TOGGLE_THREADS environment variable caps the worker count.  Results
are reassembled in manifest order and nothing in any output depends on
wall clock or scheduling, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import (PowerProxyConfig, compare_report, field_histograms,
                       render_csv, zero_fraction)
from .coding import SegmentLayout
from .systolic import ACC_BF16, ActivityCounters, ArrayConfig
from .workload import (WorkloadError, load_manifest, load_tensor, run_layer,
                       synth_layer, write_synth_model)

THREADS_ENV = "SA_TOGGLE_THREADS"


def worker_count() -> int:
    """Thread-pool size: min(4, cpus), capped by SA_TOGGLE_THREADS."""
    n = min(4, os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap is not None:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            raise WorkloadError(f"{THREADS_ENV} must be an integer, got {cap!r}")
    return n


@dataclass(frozen=True)
class SimulateRequest:
    """Everything one simulate run needs, resolved and validated."""

    manifest_path: str
    out_dir: str
    rows: int = 16
    cols: int = 16
    enable_bic: bool = False
    enable_zvcg: bool = False
    segments: str = "0:7"
    acc_mode: str = ACC_BF16

    def array_config(self) -> ArrayConfig:
        return ArrayConfig(rows=self.rows, cols=self.cols,
                           enable_bic=self.enable_bic,
                           enable_zvcg=self.enable_zvcg,
                           layout=SegmentLayout.parse(self.segments),
                           acc_mode=self.acc_mode)

    def config_echo(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "enable_bic": self.enable_bic, "enable_zvcg": self.enable_zvcg,
                "segments": self.segments, "acc_mode": self.acc_mode}


def _dump_json(obj: dict, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def simulate(req: SimulateRequest) -> dict:
    """Run every layer of a manifest; returns the run.json summary."""
    cfg = req.array_config()  # flag validation first: bad flags write nothing
    manifest = load_manifest(req.manifest_path)
    base_dir = Path(req.manifest_path).parent
    out = Path(req.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def one(layer):
        c, counters, a = run_layer(layer, cfg, base_dir)
        return layer, c, counters, zero_fraction(a)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(one, manifest.layers))

    layer_entries = []
    totals = ActivityCounters()
    for layer, c, counters, zfrac in results:
        cycles = counters.cycles or 1
        entry = {
            "name": layer.name, "m": layer.m, "k": layer.k, "n": layer.n,
            "zero_frac": zfrac,
            "counters": counters.as_dict(),
            "weight_field_means_per_cycle": {
                "exponent": counters.weight_exp_toggles / cycles,
                "mantissa": counters.weight_mant_toggles / cycles,
                "exp_over_mant_ratio": (
                    counters.weight_exp_toggles / counters.weight_mant_toggles
                    if counters.weight_mant_toggles else None),
            },
            "output": f"{layer.name}.output.bin",
        }
        layer_entries.append(entry)
        _dump_json(entry, out / f"{layer.name}.counters.json")
        (out / f"{layer.name}.output.bin").write_bytes(
            c.astype("<u2").tobytes())
        totals += counters
    summary = {
        "model_name": manifest.model_name,
        "config": req.config_echo(),
        "layers": layer_entries,
        "totals": totals.as_dict(),
    }
    _dump_json(summary, out / "run.json")
    return summary


def analyze(manifest_path: str, out_dir: str) -> dict:
    """Static tensor statistics per layer: field histograms and zero fractions."""
    manifest = load_manifest(manifest_path)
    base_dir = Path(manifest_path).parent
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layers = []
    for layer in manifest.layers:
        a = load_tensor(base_dir / layer.inputs, layer.m, layer.k)
        b = load_tensor(base_dir / layer.weights, layer.k, layer.n)
        entry = {
            "name": layer.name, "m": layer.m, "k": layer.k, "n": layer.n,
            "inputs": {"zero_frac": zero_fraction(a),
                       "histograms": field_histograms(a).as_dict()},
            "weights": {"zero_frac": zero_fraction(b),
                        "histograms": field_histograms(b).as_dict()},
        }
        layers.append(entry)
        _dump_json(entry, out / f"{layer.name}.stats.json")
    summary = {"model_name": manifest.model_name, "layers": layers}
    _dump_json(summary, out / "analysis.json")
    return summary


@dataclass(frozen=True)
class SynthLayerRequest:
    name: str
    kind: str
    m: int
    k: int
    n: int
    sigma: float = 0.05
    zero_fraction: float = 0.0


@dataclass(frozen=True)
class SynthRequest:
    model_name: str
    seed: int
    out_dir: str
    layers: tuple[SynthLayerRequest, ...] = field(default_factory=tuple)


def synthesize(req: SynthRequest) -> dict:
    """Generate a synthetic model on disk; returns {manifest: path, layers: [...]}.

    Layer i draws from streams seeded with entropy (seed, i, stream), so a
    layer's bytes depend only on the run seed and its position.
    """
    if not req.layers:
        raise WorkloadError("a synthetic model needs at least one layer")
    generated = []
    for i, layer in enumerate(req.layers):
        spec, a, b = synth_layer(
            layer.kind, layer.m, layer.k, layer.n, (req.seed, i),
            name=layer.name, sigma=layer.sigma, zero_fraction=layer.zero_fraction)
        generated.append((spec, a, b))
    manifest_path = write_synth_model(req.model_name, generated, req.out_dir)
    return {"manifest": str(manifest_path),
            "layers": [spec.name for spec, _, _ in generated]}


def compare(baseline_dir: str, proposed_dir: str, out_dir: str,
            formats: tuple[str, ...] = ("csv", "json"),
            proxy_cfg: PowerProxyConfig | None = None) -> dict:
    """Compare two simulate runs; writes compare.csv / compare.json."""
    def load_summary(run_dir: str) -> dict:
        path = Path(run_dir) / "run.json"
        try:
            return json.loads(path.read_text())
        except OSError as e:
            raise WorkloadError(f"cannot read run summary {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise WorkloadError(f"run summary {path} is not valid JSON: {e}") from e

    base = load_summary(baseline_dir)
    prop = load_summary(proposed_dir)
    try:
        report = compare_report(base["layers"], prop["layers"],
                                proxy_cfg or PowerProxyConfig())
    except (KeyError, ValueError) as e:
        raise WorkloadError(f"runs are not comparable: {e}") from e
    report["baseline_config"] = base.get("config")
    report["proposed_config"] = prop.get("config")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        _dump_json(report, out / "compare.json")
        written.append(str(out / "compare.json"))
    if "csv" in formats:
        (out / "compare.csv").write_text(render_csv(report))
        written.append(str(out / "compare.csv"))
    report["written"] = written
    return report
