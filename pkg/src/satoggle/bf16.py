"""Bit-exact Bfloat16 helpers: storage layout, rounding, arithmetic, popcounts.

A value is a plain int (or numpy uint16) holding the 16-bit pattern:
sign at bit 15, 8 exponent bits at 14..7 (bias 127), 7 mantissa bits at 6..0.
Subnormals are kept, never flushed.  Every NaN canonicalizes to 0x7FC0.

Scalar helpers round through exact float64 arithmetic (a double holds any
product or sum of two Bfloat16 values with at most one rounding, which is
safe because 53 >= 2*8 + 2).  The *_vec variants used on the simulator's
hot path round through float32 instead; for all finite Bfloat16 operands
the two routes give identical bit patterns, which the test suite checks.
"""

from __future__ import annotations

import math
import struct

import numpy as np

SIGN_MASK = 0x8000
EXP_MASK = 0x7F80
MANT_MASK = 0x007F
EXP_SHIFT = 7
EXP_BIAS = 127
QNAN = 0x7FC0
POS_INF = 0x7F80
NEG_INF = 0xFF80
WORD_BITS = 16


def fields(word: int) -> tuple[int, int, int]:
    """Split a pattern into (sign, exponent, mantissa) field values."""
    return (word >> 15) & 0x1, (word >> EXP_SHIFT) & 0xFF, word & MANT_MASK


def pack_fields(sign: int, exponent: int, mantissa: int) -> int:
    if not (0 <= sign <= 1 and 0 <= exponent <= 0xFF and 0 <= mantissa <= 0x7F):
        raise ValueError("field value out of range")
    return (sign << 15) | (exponent << EXP_SHIFT) | mantissa


def is_zero(word: int) -> bool:
    """True for +0 and -0; a negative zero counts as zero."""
    return (word & 0x7FFF) == 0


def is_nan(word: int) -> bool:
    return (word & 0x7FFF) > POS_INF


def is_inf(word: int) -> bool:
    return (word & 0x7FFF) == POS_INF


def hamming(a: int, b: int, width: int = WORD_BITS) -> int:
    """Bits that differ between two equal-width patterns."""
    limit = 1 << width
    if not (0 <= a < limit and 0 <= b < limit):
        raise ValueError(f"operands do not fit in {width} bits")
    return (a ^ b).bit_count()


def to_float(word: int) -> float:
    """Exact value of a pattern (as a double; bf16 widens losslessly)."""
    return struct.unpack("<f", struct.pack("<I", (word & 0xFFFF) << 16))[0]


def from_single(x: float) -> int:
    """Round a single-precision value to the nearest bf16, ties to even.

    The argument is interpreted as an IEEE single (a Python float is
    narrowed to single first, as a hardware conversion unit would see it).
    """
    try:
        bits = struct.unpack("<I", struct.pack("<f", x))[0]
    except OverflowError:
        # struct refuses doubles past the f32 tie point, exactly where
        # round-to-nearest produces an infinity.
        return NEG_INF if math.copysign(1.0, x) < 0.0 else POS_INF
    if (bits & 0x7FFFFFFF) > 0x7F800000:
        return QNAN
    return ((bits + 0x7FFF + ((bits >> 16) & 1)) >> 16) & 0xFFFF


def _round_to_bf16(x: float) -> int:
    # Correct single rounding from an exact double value.
    if math.isnan(x):
        return QNAN
    sign = SIGN_MASK if math.copysign(1.0, x) < 0.0 else 0
    a = abs(x)
    if math.isinf(a):
        return sign | POS_INF
    if a == 0.0:
        return sign
    if a >= 2.0**128:
        return sign | POS_INF
    if a < 2.0**-126:
        # Subnormal target: quantum 2^-133, at most 128 steps.
        q = round(math.ldexp(a, 133))
        return sign | q  # q == 128 lands on pattern 0x0080 == 2^-126, as required
    m, e = math.frexp(a)  # a == m * 2^e with 0.5 <= m < 1
    sig = round(math.ldexp(m, 8))  # in [128, 256]
    exp_field = e + 126
    if sig == 256:
        sig = 128
        exp_field += 1
    if exp_field >= 255:
        return sign | POS_INF
    return sign | (exp_field << EXP_SHIFT) | (sig - 128)


def mul(a: int, b: int) -> int:
    """Bfloat16 multiply, round to nearest even.

    The double product of two bf16 values is exact, so the one rounding
    happens here in _round_to_bf16.
    """
    if is_nan(a) or is_nan(b):
        return QNAN
    return _round_to_bf16(to_float(a) * to_float(b))


def add(a: int, b: int) -> int:
    """Bfloat16 add, round to nearest even."""
    if is_nan(a) or is_nan(b):
        return QNAN
    return _round_to_bf16(to_float(a) + to_float(b))


# ---------------------------------------------------------------------------
# Vectorized variants on numpy uint16 arrays.

def widen_vec(words: np.ndarray) -> np.ndarray:
    """uint16 patterns -> float32 array with the same values (lossless)."""
    w = np.ascontiguousarray(words, dtype=np.uint16)
    return (w.astype(np.uint32) << 16).view(np.float32)


def from_single_vec(x: np.ndarray) -> np.ndarray:
    """float32 array -> nearest bf16 patterns, ties to even, NaN -> 0x7FC0."""
    f = np.ascontiguousarray(x, dtype=np.float32)
    bits = f.view(np.uint32)
    out = ((bits + np.uint32(0x7FFF) + ((bits >> 16) & np.uint32(1))) >> 16).astype(np.uint16)
    out[np.isnan(f)] = QNAN
    return out


def from_float_vec(x: np.ndarray) -> np.ndarray:
    """Bulk-convert real data (float64) to bf16 by way of float32.

    Meant for workload generation; the intermediate narrowing can move a
    result by one ulp relative to direct double rounding, which is fine
    for synthetic data and keeps the conversion identical to what a host
    framework would produce.
    """
    with np.errstate(over="ignore"):
        return from_single_vec(np.asarray(x, dtype=np.float64).astype(np.float32))


def is_zero_vec(words: np.ndarray) -> np.ndarray:
    return (np.asarray(words, dtype=np.uint16) & np.uint16(0x7FFF)) == 0


def mul_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise bf16 multiply; bit-identical to the scalar op."""
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        return from_single_vec(widen_vec(a) * widen_vec(b))


def add_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise bf16 add; bit-identical to the scalar op."""
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        return from_single_vec(widen_vec(a) + widen_vec(b))


def popcount_vec(x: np.ndarray) -> int:
    """Total set bits across an unsigned integer array."""
    return int(np.bitwise_count(x).sum())
