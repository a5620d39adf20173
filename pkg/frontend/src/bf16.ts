/**
 * Bfloat16 helpers on uint16 bit patterns.
 *
 * bf16 is the upper half of IEEE single: 1 sign, 8 exponent (bias 127),
 * 7 mantissa bits. Rounding is to nearest, ties to even, done on the
 * float32 representation with the carry trick; every NaN canonicalizes
 * to 0x7FC0. This matches the simulator's arithmetic bit for bit.
 */

export const SIGN_MASK = 0x8000;
export const EXP_MASK = 0x7f80;
export const MANT_MASK = 0x007f;
export const QNAN = 0x7fc0;

const buf = new ArrayBuffer(4);
const f32 = new Float32Array(buf);
const u32 = new Uint32Array(buf);

/** Round a JS number (f64) to bf16: f64 -> f32 (fround) -> bf16 RNE. */
export function roundToBf16(x: number): number {
  f32[0] = x; // stores Math.fround(x)
  return bf16FromF32Bits(u32[0]);
}

/** Round-to-nearest-even from float32 bits to a bf16 pattern. */
export function bf16FromF32Bits(bits: number): number {
  if ((bits & 0x7fffffff) > 0x7f800000) {
    return QNAN;
  }
  // Non-NaN bits are at most 0xff800000, so the sum stays below 2^32
  // and >>> 16 is safe.
  const rb = (bits >>> 16) & 1;
  return (bits + 0x7fff + rb) >>> 16;
}

/** Widen a bf16 pattern to the float32 value it denotes. */
export function toNumber(w: number): number {
  u32[0] = (w & 0xffff) << 16 >>> 0;
  return f32[0];
}

export function isZero(w: number): boolean {
  return (w & 0x7fff) === 0;
}

/** bf16 product, rounded once: matches f32 multiply then RNE to bf16. */
export function mulBf16(a: number, b: number): number {
  f32[0] = toNumber(a) * toNumber(b);
  return bf16FromF32Bits(u32[0]);
}

/** bf16 sum, rounded once. */
export function addBf16(a: number, b: number): number {
  f32[0] = toNumber(a) + toNumber(b);
  return bf16FromF32Bits(u32[0]);
}

/** Round a Float32Array (or number array) elementwise to bf16 patterns. */
export function roundVecToBf16(xs: ArrayLike<number>): Uint16Array {
  const out = new Uint16Array(xs.length);
  for (let i = 0; i < xs.length; i++) {
    out[i] = roundToBf16(xs[i]);
  }
  return out;
}

/** Widen a bf16 pattern array to float32 values. */
export function widenVec(ws: Uint16Array): Float32Array {
  const out = new Float32Array(ws.length);
  for (let i = 0; i < ws.length; i++) {
    out[i] = toNumber(ws[i]);
  }
  return out;
}
