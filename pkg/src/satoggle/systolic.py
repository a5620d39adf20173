"""Cycle-accurate output-stationary systolic array with toggle accounting.

PE(i, j) keeps partial sum C[i, j] stationary.  Activations enter at the
west edge and move east one PE per cycle; weights enter at the north edge
and move south.  Row i of A is injected i cycles late and column j of B is
injected j cycles late, so A[i, k] and B[k, j] meet in PE(i, j) at cycle
i + j + k.  A full M x K by K x N tile therefore takes
(M-1) + (N-1) + (K-1) + 1 compute cycles, after which results shift out
south through the accumulator column, one row per cycle.

Every register transition is counted as the Hamming distance between the
register's pattern before and after the clock edge.  A register that holds
(pipeline bubble, gated input, idle lane) contributes zero.  One-bit valid
sidebands travel with both streams so the skew window needs no global
control; valid bits are bookkeeping, not counted registers.

With bus-invert coding enabled the north edge drives encoded weight words
plus per-segment inversion bits that ride alongside.  With zero-value
clock gating enabled an is-zero flag is computed once at the west edge
and pipelined with the activation; a set flag freezes the input data
register and skips the MAC, and the flag register itself is counted.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .bf16 import add_vec, from_single_vec, is_zero_vec, mul_vec, widen_vec
from .coding import DEFAULT_LAYOUT, SegmentLayout, bic_decode_vec, bic_encode_vec

ACC_BF16 = "bf16-per-step"
ACC_SINGLE = "single-accumulate"

MANT_MASK16 = np.uint16(0x007F)
EXP_MASK16 = np.uint16(0x7F80)
SIGN_MASK16 = np.uint16(0x8000)


@dataclass(frozen=True)
class ArrayConfig:
    """Static shape and feature switches for one simulation."""

    rows: int = 16
    cols: int = 16
    enable_bic: bool = False
    enable_zvcg: bool = False
    layout: SegmentLayout = DEFAULT_LAYOUT
    acc_mode: str = ACC_BF16

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("array needs at least one row and one column")
        if self.acc_mode not in (ACC_BF16, ACC_SINGLE):
            raise ValueError(f"unknown accumulator mode {self.acc_mode!r}")


@dataclass
class ActivityCounters:
    """Switching totals for one run; all monotone while the clock advances.

    weight_reg_toggles always equals the sum of its sign/exponent/mantissa
    splits; cycles counts compute cycles only (unload activity lands in
    unload_toggles but unload edges are not MAC cycles).
    """

    input_reg_toggles: int = 0
    weight_reg_toggles: int = 0
    weight_sign_toggles: int = 0
    weight_exp_toggles: int = 0
    weight_mant_toggles: int = 0
    inv_bit_toggles: int = 0
    iszero_bit_toggles: int = 0
    acc_toggles: int = 0
    unload_toggles: int = 0
    macs_performed: int = 0
    macs_skipped: int = 0
    cycles: int = 0

    def __iadd__(self, other: "ActivityCounters") -> "ActivityCounters":
        for f in dc_fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "ActivityCounters":
        return cls(**{f.name: int(d[f.name]) for f in dc_fields(cls)})


def inject_schedule(a: np.ndarray, b: np.ndarray, t: int):
    """Edge drive for cycle t: (west words per row, north words per column).

    Row i of the west edge carries A[i, t-i] while 0 <= t-i < K, else a
    bubble (None).  Column j of the north edge carries B[t-j, j] under the
    same window.
    """
    m, k = a.shape
    _, n = b.shape
    west = [int(a[i, t - i]) if 0 <= t - i < k else None for i in range(m)]
    north = [int(b[t - j, j]) if 0 <= t - j < k else None for j in range(n)]
    return west, north


class TileSimulation:
    """One tile pass: an M x K by K x N product on an M x N corner of the array.

    Drive it with step(west, north) per clock edge, or run() to play the
    standard schedule; unload() shifts results out and returns C.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, cfg: ArrayConfig):
        a = np.ascontiguousarray(a, dtype=np.uint16)
        b = np.ascontiguousarray(b, dtype=np.uint16)
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch: {a.shape} by {b.shape}")
        m, k = a.shape
        _, n = b.shape
        if k < 1:
            raise ValueError("depth K must be at least 1")
        if m > cfg.rows or n > cfg.cols:
            raise ValueError(
                f"tile {m}x{n} exceeds the {cfg.rows}x{cfg.cols} array")
        self.a, self.b, self.cfg = a, b, cfg
        self.m, self.k, self.n = m, k, n
        self.compute_cycles = (m - 1) + (n - 1) + (k - 1) + 1
        self.t = 0
        self.unloaded = False
        self.counters = ActivityCounters()

        shape = (m, n)
        self.in_reg = np.zeros(shape, np.uint16)
        self.in_flag = np.zeros(shape, bool)
        self.a_valid = np.zeros(shape, bool)
        self.wire = np.zeros(shape, np.uint16)
        self.inv = np.zeros(shape, np.uint16)
        self.b_valid = np.zeros(shape, bool)
        if cfg.acc_mode == ACC_SINGLE:
            self.acc = np.zeros(shape, np.uint32)
        else:
            self.acc = np.zeros(shape, np.uint16)

    def step(self, west, north) -> None:
        """Advance one clock edge with explicit edge drive (None == bubble)."""
        if self.t >= self.compute_cycles:
            raise RuntimeError("stepping past the compute phase")
        cfg = self.cfg
        c = self.counters

        west_vals = np.fromiter(
            (0 if v is None else v for v in west), np.uint16, count=self.m)
        west_valid = np.fromiter(
            (v is not None for v in west), bool, count=self.m)
        north_vals = np.fromiter(
            (0 if v is None else v for v in north), np.uint16, count=self.n)
        north_valid = np.fromiter(
            (v is not None for v in north), bool, count=self.n)

        if cfg.enable_zvcg:
            edge_flag = is_zero_vec(west_vals) & west_valid
        else:
            edge_flag = np.zeros(self.m, bool)

        # The encoder's reference state is the row-0 wire register: it holds
        # exactly the word the encoder last drove (both reset to zero).
        if cfg.enable_bic:
            enc_wire, enc_inv = bic_encode_vec(self.wire[0], north_vals, cfg.layout)
        else:
            enc_wire, enc_inv = north_vals, np.zeros(self.n, np.uint16)

        # What each PE sees on its inputs before the edge.
        in_val = np.concatenate([west_vals[:, None], self.in_reg[:, :-1]], axis=1)
        in_avalid = np.concatenate([west_valid[:, None], self.a_valid[:, :-1]], axis=1)
        in_flag = np.concatenate([edge_flag[:, None], self.in_flag[:, :-1]], axis=1)
        in_wire = np.concatenate([enc_wire[None, :], self.wire[:-1, :]], axis=0)
        in_inv = np.concatenate([enc_inv[None, :], self.inv[:-1, :]], axis=0)
        in_bvalid = np.concatenate([north_valid[None, :], self.b_valid[:-1, :]], axis=0)

        # Latch.  Data registers hold on bubbles; the input register also
        # holds when a set is-zero flag arrives (that is the clock gate).
        new_flag = np.where(in_avalid, in_flag, self.in_flag)
        new_in = np.where(in_avalid & ~in_flag, in_val, self.in_reg)
        new_wire = np.where(in_bvalid, in_wire, self.wire)
        new_inv = np.where(in_bvalid, in_inv, self.inv)

        c.input_reg_toggles += int(np.bitwise_count(self.in_reg ^ new_in).sum())
        dw = self.wire ^ new_wire
        if dw.any():
            c.weight_reg_toggles += int(np.bitwise_count(dw).sum())
            c.weight_sign_toggles += int(np.bitwise_count(dw & SIGN_MASK16).sum())
            c.weight_exp_toggles += int(np.bitwise_count(dw & EXP_MASK16).sum())
            c.weight_mant_toggles += int(np.bitwise_count(dw & MANT_MASK16).sum())
        c.inv_bit_toggles += int(np.bitwise_count(self.inv ^ new_inv).sum())
        c.iszero_bit_toggles += int((self.in_flag ^ new_flag).sum())

        self.in_reg, self.in_flag = new_in, new_flag
        self.wire, self.inv = new_wire, new_inv
        self.a_valid, self.b_valid = in_avalid, in_bvalid

        # MAC fires where both operands just arrived; a set flag skips it.
        pair = self.a_valid & self.b_valid
        live = pair & ~self.in_flag
        c.macs_skipped += int((pair & self.in_flag).sum())
        c.macs_performed += int(live.sum())
        if live.any():
            weights = bic_decode_vec(self.wire, self.inv, cfg.layout) \
                if cfg.enable_bic else self.wire
            if cfg.acc_mode == ACC_SINGLE:
                acc_f = self.acc.view(np.float32)
                with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                    summed = acc_f + widen_vec(self.in_reg) * widen_vec(weights)
                new_acc = np.where(live, summed.view(np.uint32), self.acc)
            else:
                prod = mul_vec(self.in_reg, weights)
                new_acc = np.where(live, add_vec(self.acc, prod), self.acc)
            c.acc_toggles += int(np.bitwise_count(self.acc ^ new_acc).sum())
            self.acc = new_acc

        self.t += 1
        c.cycles += 1

    def run(self) -> None:
        while self.t < self.compute_cycles:
            west, north = inject_schedule(self.a, self.b, self.t)
            self.step(west, north)

    def unload(self) -> np.ndarray:
        """Shift accumulators out through the south edge, one row per edge.

        Registers behind the shifted-out row take their north neighbour's
        pattern (zero backfill at the top), and those transitions are what
        unload_toggles counts.  Returns C with rows in natural order.
        """
        if self.t < self.compute_cycles:
            raise RuntimeError("unload before the compute phase finished")
        if self.unloaded:
            raise RuntimeError("tile already unloaded")
        grid = self.acc
        out = np.empty_like(grid)
        zero_row = np.zeros((1, self.n), grid.dtype)
        for u in range(self.m):
            out[self.m - 1 - u] = grid[-1]
            shifted = np.concatenate([zero_row, grid[:-1]], axis=0)
            self.counters.unload_toggles += int(np.bitwise_count(grid ^ shifted).sum())
            grid = shifted
        self.acc = grid
        self.unloaded = True
        if self.cfg.acc_mode == ACC_SINGLE:
            return from_single_vec(out.view(np.float32))
        return out


def run_tile(a: np.ndarray, b: np.ndarray,
             cfg: ArrayConfig) -> tuple[np.ndarray, ActivityCounters]:
    """Simulate one tile end to end; returns (C, counters)."""
    sim = TileSimulation(a, b, cfg)
    sim.run()
    c = sim.unload()
    return c, sim.counters
