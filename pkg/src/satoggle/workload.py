"""Workload handling: manifests, raw bf16 tensors, tiling, synthetic layers.

A model is a JSON manifest naming GEMM layers plus one raw tensor file per
operand.  Tensor files are headerless little-endian 16-bit words, row major,
so a rows x cols tensor is exactly rows * cols * 2 bytes.  Tensor paths in
the manifest resolve relative to the manifest's directory.

GEMMs larger than the array are tiled: row blocks of at most `rows`, column
blocks of at most `cols`, and the K dimension in slices of `rows` (matching
the height of the weight column a tile streams through the array).  Each
tile starts from a freshly reset array; partial K results combine on the
host with bf16 adds in ascending K order, and host combining adds nothing
to the toggle counters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bf16 import add_vec, from_float_vec
from .systolic import ActivityCounters, ArrayConfig, run_tile

MANIFEST_DTYPE = "bf16"

SYNTH_KINDS = (
    "uniform-mantissa-weights",
    "gaussian-weights",
    "zero-fraction-inputs",
    "cnn-like",
)


class WorkloadError(Exception):
    """A manifest or tensor file is missing, malformed, or inconsistent."""


@dataclass
class LayerSpec:
    """One GEMM layer: inputs are M x K, weights are K x N."""

    name: str
    m: int
    k: int
    n: int
    weights: str
    inputs: str
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "m": self.m, "k": self.k, "n": self.n,
                "weights": self.weights, "inputs": self.inputs, "meta": self.meta}


@dataclass
class Manifest:
    model_name: str
    layers: list[LayerSpec]
    dtype: str = MANIFEST_DTYPE

    def as_dict(self) -> dict:
        return {"model_name": self.model_name, "dtype": self.dtype,
                "layers": [layer.as_dict() for layer in self.layers]}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise WorkloadError(msg)


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise WorkloadError(f"cannot read manifest {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise WorkloadError(f"manifest {path} is not valid JSON: {e}") from e
    _require(isinstance(doc, dict), "manifest root must be an object")
    _require(doc.get("dtype") == MANIFEST_DTYPE,
             f"manifest dtype must be {MANIFEST_DTYPE!r}, got {doc.get('dtype')!r}")
    _require(isinstance(doc.get("model_name"), str) and doc["model_name"],
             "manifest needs a non-empty model_name")
    raw_layers = doc.get("layers")
    _require(isinstance(raw_layers, list) and raw_layers,
             "manifest needs a non-empty layers list")
    layers = []
    seen = set()
    for entry in raw_layers:
        _require(isinstance(entry, dict), "each layer must be an object")
        try:
            layer = LayerSpec(
                name=entry["name"], m=int(entry["m"]), k=int(entry["k"]),
                n=int(entry["n"]), weights=entry["weights"],
                inputs=entry["inputs"], meta=entry.get("meta", {}))
        except (KeyError, TypeError, ValueError) as e:
            raise WorkloadError(f"bad layer entry {entry!r}: {e}") from e
        _require(layer.m >= 1 and layer.k >= 1 and layer.n >= 1,
                 f"layer {layer.name!r} has non-positive dimensions")
        _require(layer.name not in seen, f"duplicate layer name {layer.name!r}")
        seen.add(layer.name)
        layers.append(layer)
    return Manifest(model_name=doc["model_name"], layers=layers)


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    Path(path).write_text(json.dumps(manifest.as_dict(), indent=2, sort_keys=True) + "\n")


def load_tensor(path: str | Path, rows: int, cols: int) -> np.ndarray:
    """Read a raw bf16 tensor file and check its size against rows x cols."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise WorkloadError(f"cannot read tensor {path}: {e}") from e
    expected = rows * cols * 2
    _require(len(data) == expected,
             f"tensor {path} holds {len(data)} bytes, expected {expected} "
             f"for {rows}x{cols}")
    return np.frombuffer(data, dtype="<u2").reshape(rows, cols).astype(np.uint16)


def save_tensor(tensor: np.ndarray, path: str | Path) -> None:
    arr = np.ascontiguousarray(tensor, dtype=np.uint16)
    Path(path).write_bytes(arr.astype("<u2").tobytes())


def tile_and_run(a: np.ndarray, b: np.ndarray,
                 cfg: ArrayConfig) -> tuple[np.ndarray, ActivityCounters]:
    """Run a full GEMM through the array, tiling as needed.

    Returns bf16 C (M x N) and the summed counters of every tile pass.
    """
    a = np.ascontiguousarray(a, dtype=np.uint16)
    b = np.ascontiguousarray(b, dtype=np.uint16)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise WorkloadError(f"GEMM shape mismatch: {a.shape} by {b.shape}")
    m, k = a.shape
    _, n = b.shape
    k_tile = cfg.rows
    c = np.zeros((m, n), np.uint16)
    totals = ActivityCounters()
    for rb in range(0, m, cfg.rows):
        re = min(rb + cfg.rows, m)
        for cb in range(0, n, cfg.cols):
            ce = min(cb + cfg.cols, n)
            block = None
            for kb in range(0, k, k_tile):
                ke = min(kb + k_tile, k)
                part, counters = run_tile(a[rb:re, kb:ke], b[kb:ke, cb:ce], cfg)
                totals += counters
                block = part if block is None else add_vec(block, part)
            c[rb:re, cb:ce] = block
    return c, totals


def run_layer(layer: LayerSpec, cfg: ArrayConfig,
              base_dir: str | Path) -> tuple[np.ndarray, ActivityCounters, np.ndarray]:
    """Load a layer's tensors and run it; returns (C, counters, inputs)."""
    base = Path(base_dir)
    a = load_tensor(base / layer.inputs, layer.m, layer.k)
    b = load_tensor(base / layer.weights, layer.k, layer.n)
    c, counters = tile_and_run(a, b, cfg)
    return c, counters, a


# ---------------------------------------------------------------------------
# Synthetic layers.  All randomness is PCG64 seeded via SeedSequence with
# entropy (*seed, stream): stream 0 draws weights, 1 draws input values,
# 2 draws the zero mask.  Same seed, same bytes, on any platform.

_STREAM_WEIGHTS, _STREAM_INPUTS, _STREAM_MASK = 0, 1, 2


def _rng(seed, stream: int) -> np.random.Generator:
    base = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((*base, stream))))


def synth_layer(kind: str, m: int, k: int, n: int, seed,
                name: str = "synth", sigma: float = 0.05,
                zero_fraction: float = 0.0) -> tuple[LayerSpec, np.ndarray, np.ndarray]:
    """Generate one synthetic layer; returns (spec, inputs MxK, weights KxN).

    uniform-mantissa-weights: weights uniform on [-1, 1], dense inputs.
    gaussian-weights:         weights N(0, sigma^2) clipped to [-1, 1].
    zero-fraction-inputs:     each input exactly zero with probability
                              zero_fraction, weights uniform on [-1, 1].
    cnn-like:                 gaussian weights and zero-fraction inputs
                              together (a trained-conv-layer stand-in).
    """
    if kind not in SYNTH_KINDS:
        raise WorkloadError(f"unknown synth kind {kind!r}")
    if m < 1 or k < 1 or n < 1:
        raise WorkloadError("synth dimensions must be positive")
    if sigma <= 0.0:
        raise WorkloadError("sigma must be positive")
    if not 0.0 <= zero_fraction <= 1.0:
        raise WorkloadError("zero_fraction must lie in [0, 1]")

    w_rng = _rng(seed, _STREAM_WEIGHTS)
    if kind in ("gaussian-weights", "cnn-like"):
        w = np.clip(w_rng.normal(0.0, sigma, size=(k, n)), -1.0, 1.0)
    else:
        w = w_rng.uniform(-1.0, 1.0, size=(k, n))

    # 1 - random() lies in (0, 1]: inputs have no accidental zeros, so the
    # zero mask alone decides what the clock gate sees.
    a = 1.0 - _rng(seed, _STREAM_INPUTS).random(size=(m, k))
    if kind in ("zero-fraction-inputs", "cnn-like"):
        mask = _rng(seed, _STREAM_MASK).random(size=(m, k)) < zero_fraction
        a[mask] = 0.0

    meta = {"kind": kind, "seed": list(seed) if isinstance(seed, (tuple, list)) else seed}
    if kind in ("gaussian-weights", "cnn-like"):
        meta["sigma"] = sigma
    if kind in ("zero-fraction-inputs", "cnn-like"):
        meta["zero_fraction"] = zero_fraction
    spec = LayerSpec(name=name, m=m, k=k, n=n,
                     weights=f"{name}.weights.bin", inputs=f"{name}.inputs.bin",
                     meta=meta)
    return spec, from_float_vec(a), from_float_vec(w)


def write_synth_model(model_name: str, layers: list[tuple[LayerSpec, np.ndarray, np.ndarray]],
                      out_dir: str | Path) -> Path:
    """Write tensors plus manifest for already-generated layers; returns manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for spec, a, b in layers:
        save_tensor(a, out / spec.inputs)
        save_tensor(b, out / spec.weights)
    manifest = Manifest(model_name=model_name, layers=[spec for spec, _, _ in layers])
    path = out / "manifest.json"
    save_manifest(manifest, path)
    return path
