/**
 * Reference GEMM and direct convolution in bf16.
 *
 * Both accumulate in ascending K order from +0 with one bf16 rounding
 * per multiply and per add, the same semantics the simulator applies
 * per MAC, so im2col + GEMM must match direct convolution bit for bit.
 */

import { addBf16, mulBf16, toNumber } from './bf16.js';
import { ConvGeometry, convOutSize } from './im2col.js';

/** C[m,n] = A[m,k] @ B[k,n] with per-step bf16 rounding, k ascending. */
export function gemmBf16(
  a: Uint16Array, m: number, k: number, b: Uint16Array, n: number,
): Uint16Array {
  if (a.length !== m * k || b.length !== k * n) {
    throw new Error(`gemm shape mismatch: ${a.length} vs ${m}x${k}, ${b.length} vs ${k}x${n}`);
  }
  const c = new Uint16Array(m * n);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < n; j++) {
      let acc = 0;
      for (let kk = 0; kk < k; kk++) {
        acc = addBf16(acc, mulBf16(a[i * k + kk], b[kk * n + j]));
      }
      c[i * n + j] = acc;
    }
  }
  return c;
}

/**
 * Direct NHWC convolution with per-step bf16 rounding. Taps outside the
 * padded input are skipped; adding their zero products would not change
 * any accumulator, so this equals the im2col GEMM exactly.
 */
export function directConvBf16(
  img: Uint16Array, h: number, w: number, c: number,
  kernel: Uint16Array, outC: number, geo: ConvGeometry,
): { data: Uint16Array; outH: number; outW: number } {
  const { kh, kw, stride, pad } = geo;
  const outH = convOutSize(h, kh, stride, pad);
  const outW = convOutSize(w, kw, stride, pad);
  const data = new Uint16Array(outH * outW * outC);
  for (let oy = 0; oy < outH; oy++) {
    for (let ox = 0; ox < outW; ox++) {
      for (let oc = 0; oc < outC; oc++) {
        let acc = 0;
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
            for (let cc = 0; cc < c; cc++) {
              const av = img[(iy * w + ix) * c + cc];
              const bv = kernel[((dy * kw + dx) * c + cc) * outC + oc];
              acc = addBf16(acc, mulBf16(av, bv));
            }
          }
        }
        data[(oy * outW + ox) * outC + oc] = acc;
      }
    }
  }
  return { data, outH, outW };
}

/** Direct convolution accumulated exactly in f64, for drift bounds. */
export function directConvF64(
  img: Uint16Array, h: number, w: number, c: number,
  kernel: Uint16Array, outC: number, geo: ConvGeometry,
): Float64Array {
  const { kh, kw, stride, pad } = geo;
  const outH = convOutSize(h, kh, stride, pad);
  const outW = convOutSize(w, kw, stride, pad);
  const data = new Float64Array(outH * outW * outC);
  for (let oy = 0; oy < outH; oy++) {
    for (let ox = 0; ox < outW; ox++) {
      for (let oc = 0; oc < outC; oc++) {
        let acc = 0;
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
            for (let cc = 0; cc < c; cc++) {
              acc += toNumber(img[(iy * w + ix) * c + cc])
                * toNumber(kernel[((dy * kw + dx) * c + cc) * outC + oc]);
            }
          }
        }
        data[(oy * outW + ox) * outC + oc] = acc;
      }
    }
  }
  return data;
}
