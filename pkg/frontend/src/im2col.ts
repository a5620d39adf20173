/**
 * im2col lowering of 2D convolution to GEMM.
 *
 * Input is one NHWC image (H x W x C, row-major), kernels are HWIO.
 * Each output position (oy, ox) becomes one row of the patch matrix;
 * the K axis enumerates (dy, dx, c) in that order, which is exactly the
 * row-major flattening of an HWIO kernel, so the lowered weight matrix
 * is the kernel buffer reinterpreted as (kh*kw*inC) x outC.
 */

export interface ConvGeometry {
  kh: number;
  kw: number;
  stride: number;
  pad: number;
}

export function convOutSize(size: number, k: number, stride: number, pad: number): number {
  const out = Math.floor((size + 2 * pad - k) / stride) + 1;
  if (out < 1) {
    throw new Error(`kernel ${k} does not fit input ${size} with pad ${pad}`);
  }
  return out;
}

export interface PatchMatrix {
  data: Uint16Array; // m x k row-major bf16 patterns
  m: number;
  k: number;
  outH: number;
  outW: number;
}

/** Unfold an H x W x C bf16 image into the M x K patch matrix. */
export function im2col(
  img: Uint16Array, h: number, w: number, c: number, geo: ConvGeometry,
): PatchMatrix {
  if (img.length !== h * w * c) {
    throw new Error(`image buffer ${img.length} != ${h}*${w}*${c}`);
  }
  const { kh, kw, stride, pad } = geo;
  const outH = convOutSize(h, kh, stride, pad);
  const outW = convOutSize(w, kw, stride, pad);
  const m = outH * outW;
  const k = kh * kw * c;
  const data = new Uint16Array(m * k); // out-of-bounds taps stay +0
  let row = 0;
  for (let oy = 0; oy < outH; oy++) {
    for (let ox = 0; ox < outW; ox++, row++) {
      const base = row * k;
      for (let dy = 0; dy < kh; dy++) {
        const iy = oy * stride + dy - pad;
        if (iy < 0 || iy >= h) {
          continue;
        }
        for (let dx = 0; dx < kw; dx++) {
          const ix = ox * stride + dx - pad;
          if (ix < 0 || ix >= w) {
            continue;
          }
          const src = (iy * w + ix) * c;
          const dst = base + (dy * kw + dx) * c;
          data.set(img.subarray(src, src + c), dst);
        }
      }
    }
  }
  return { data, m, k, outH, outW };
}

/**
 * Lower an HWIO kernel to the K x N weight matrix. Row-major HWIO is
 * already (kh*kw*inC) x outC, so this only checks the size.
 */
export function lowerKernel(
  kernel: Uint16Array, kh: number, kw: number, inC: number, outC: number,
): Uint16Array {
  if (kernel.length !== kh * kw * inC * outC) {
    throw new Error(`kernel buffer ${kernel.length} != ${kh}*${kw}*${inC}*${outC}`);
  }
  return kernel;
}
