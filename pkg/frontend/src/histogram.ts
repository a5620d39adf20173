/**
 * Field histograms over bf16 patterns, mirroring the simulator's
 * per-layer operand statistics: sign (2 bins), exponent field (256),
 * mantissa field (128).
 */

export interface FieldHistograms {
  sign: number[];
  exponent: number[];
  mantissa: number[];
  total: number;
}

export function fieldHistograms(data: Uint16Array): FieldHistograms {
  const sign = new Array<number>(2).fill(0);
  const exponent = new Array<number>(256).fill(0);
  const mantissa = new Array<number>(128).fill(0);
  for (let i = 0; i < data.length; i++) {
    const w = data[i];
    sign[w >> 15]++;
    exponent[(w >> 7) & 0xff]++;
    mantissa[w & 0x7f]++;
  }
  return { sign, exponent, mantissa, total: data.length };
}

/**
 * Smallest fraction-of-nonzero-mass NOT covered by the best window of
 * `band` consecutive exponent bins, over nonzero words only. A return
 * of 0.05 means some 16-bin band holds 95% of the nonzero mass.
 */
export function exponentBandCoverage(data: Uint16Array, band: number): number {
  const counts = new Array<number>(256).fill(0);
  let nonzero = 0;
  for (let i = 0; i < data.length; i++) {
    if ((data[i] & 0x7fff) !== 0) {
      counts[(data[i] >> 7) & 0xff]++;
      nonzero++;
    }
  }
  if (nonzero === 0) {
    return 1;
  }
  let windowSum = 0;
  for (let i = 0; i < band && i < 256; i++) {
    windowSum += counts[i];
  }
  let best = windowSum;
  for (let i = band; i < 256; i++) {
    windowSum += counts[i] - counts[i - band];
    if (windowSum > best) {
      best = windowSum;
    }
  }
  return best / nonzero;
}

/** Max-bin over min-bin ratio of the mantissa histogram of nonzero words. */
export function mantissaFlatnessRatio(data: Uint16Array): number {
  const counts = new Array<number>(128).fill(0);
  for (let i = 0; i < data.length; i++) {
    if ((data[i] & 0x7fff) !== 0) {
      counts[data[i] & 0x7f]++;
    }
  }
  const max = Math.max(...counts);
  const min = Math.min(...counts);
  if (min === 0) {
    return Infinity;
  }
  return max / min;
}
