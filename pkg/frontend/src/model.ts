/**
 * CNN construction, training, and layer capture via tfjs (cpu backend).
 *
 * The demo model is a small conv/dense stack trained briefly on a
 * synthetic brightest-quadrant task so its weights look like a trained
 * network's rather than a raw initializer draw. Capture walks a
 * sequential model layer by layer, recording each conv/dense layer's
 * kernel and its per-image input (post-ReLU of the previous layer).
 */

import * as tf from '@tensorflow/tfjs';

export const IMAGE_H = 16;
export const IMAGE_W = 16;
export const IMAGE_C = 3;
const CLASSES = 10;

/** Deterministic 32-bit PRNG; uniform on [0, 1). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export async function useCpuBackend(): Promise<void> {
  await tf.setBackend('cpu');
  await tf.ready();
}

/** Pixel values in (0, 1]: a raw image carries no exact zeros. */
export function syntheticImages(count: number, rng: () => number): Float32Array {
  const out = new Float32Array(count * IMAGE_H * IMAGE_W * IMAGE_C);
  for (let i = 0; i < out.length; i++) {
    out[i] = 1 - rng();
  }
  return out;
}

/** Label = which image quadrant has the highest mean brightness (0..3). */
function quadrantLabels(images: Float32Array, count: number): Int32Array {
  const labels = new Int32Array(count);
  const halfH = IMAGE_H / 2;
  const halfW = IMAGE_W / 2;
  const stride = IMAGE_H * IMAGE_W * IMAGE_C;
  for (let img = 0; img < count; img++) {
    let best = -1;
    let bestSum = -Infinity;
    for (let q = 0; q < 4; q++) {
      const y0 = q < 2 ? 0 : halfH;
      const x0 = q % 2 === 0 ? 0 : halfW;
      let sum = 0;
      for (let y = y0; y < y0 + halfH; y++) {
        for (let x = x0; x < x0 + halfW; x++) {
          const base = img * stride + (y * IMAGE_W + x) * IMAGE_C;
          sum += images[base] + images[base + 1] + images[base + 2];
        }
      }
      if (sum > bestSum) {
        bestSum = sum;
        best = q;
      }
    }
    labels[img] = best;
  }
  return labels;
}

/**
 * Small sequential CNN with seeded initializers and explicit layer
 * names (tfjs auto-names depend on process-global counters). Layers
 * carry no bias so each one is exactly one GEMM.
 */
export function buildDemoCnn(seed: number): tf.Sequential {
  const conv = (name: string, filters: number, s: number) =>
    tf.layers.conv2d({
      name, filters, kernelSize: 3, padding: 'same', activation: 'relu',
      useBias: false, kernelInitializer: tf.initializers.heNormal({ seed: s }),
    });
  const model = tf.sequential();
  model.add(tf.layers.inputLayer({ inputShape: [IMAGE_H, IMAGE_W, IMAGE_C] }));
  model.add(conv('conv1', 8, seed));
  model.add(conv('conv2', 16, seed + 1));
  model.add(tf.layers.maxPooling2d({ name: 'pool1', poolSize: 2 }));
  model.add(conv('conv3', 16, seed + 2));
  model.add(tf.layers.flatten({ name: 'flat' }));
  model.add(tf.layers.dense({
    name: 'fc1', units: 48, activation: 'relu', useBias: false,
    kernelInitializer: tf.initializers.heNormal({ seed: seed + 3 }),
  }));
  model.add(tf.layers.dense({
    name: 'fc2', units: CLASSES, useBias: false,
    kernelInitializer: tf.initializers.heNormal({ seed: seed + 4 }),
  }));
  return model;
}

/** A few deterministic SGD steps; returns the final batch loss. */
export function trainDemoCnn(model: tf.Sequential, seed: number, steps: number): number {
  const rng = mulberry32(seed ^ 0x5f3759df);
  const optimizer = tf.train.sgd(0.15);
  const batch = 8;
  let lastLoss = 0;
  for (let step = 0; step < steps; step++) {
    const pixels = syntheticImages(batch, rng);
    const labels = quadrantLabels(pixels, batch);
    const xs = tf.tensor4d(pixels, [batch, IMAGE_H, IMAGE_W, IMAGE_C]);
    const ys = tf.oneHot(tf.tensor1d(labels, 'int32'), CLASSES);
    const loss = optimizer.minimize(() => {
      const logits = model.apply(xs, { training: true }) as tf.Tensor2D;
      return tf.losses.softmaxCrossEntropy(ys, logits) as tf.Scalar;
    }, true);
    lastLoss = loss!.dataSync()[0];
    loss!.dispose();
    xs.dispose();
    ys.dispose();
  }
  optimizer.dispose();
  return lastLoss;
}

export interface CapturedConv {
  op: 'conv2d';
  name: string;
  kh: number;
  kw: number;
  inC: number;
  outC: number;
  stride: number;
  pad: number;
  inH: number;
  inW: number;
  kernel: Float32Array; // HWIO row-major
  inputs: Float32Array[]; // one H*W*C image per export image
}

export interface CapturedDense {
  op: 'dense';
  name: string;
  inFeatures: number;
  units: number;
  kernel: Float32Array; // inFeatures x units row-major
  inputs: Float32Array[];
}

export type CapturedLayer = CapturedConv | CapturedDense;

function convPad(kernel: number, stride: number, padding: string): number {
  if (padding === 'valid') {
    return 0;
  }
  if (padding !== 'same') {
    throw new Error(`unsupported padding mode ${padding}`);
  }
  if (stride !== 1 || kernel % 2 === 0) {
    // TF 'same' becomes asymmetric here; not representable as one pad value.
    throw new Error(`'same' padding supported only for stride 1, odd kernels`);
  }
  return (kernel - 1) / 2;
}

function asPair(v: number | number[]): [number, number] {
  return Array.isArray(v) ? [v[0], v[1]] : [v, v];
}

function dim(t: tf.Tensor, i: number): number {
  const d = t.shape[i];
  if (d === undefined) {
    throw new Error(`tensor of rank ${t.shape.length} has no dimension ${i}`);
  }
  return d;
}

/**
 * Run `images` through a sequential model, recording every conv/dense
 * layer's kernel and per-image inputs. Non-GEMM layers (pooling,
 * flatten, activations) just forward.
 */
export async function captureLayers(
  model: tf.LayersModel, images: tf.Tensor4D,
): Promise<CapturedLayer[]> {
  if (!(model instanceof tf.Sequential)) {
    throw new Error('only sequential (linear) models can be captured');
  }
  const captured: CapturedLayer[] = [];
  const count = images.shape[0];
  let x: tf.Tensor = images;
  const owned: tf.Tensor[] = [];
  try {
    for (const layer of model.layers) {
      const cls = layer.getClassName();
      if (cls === 'InputLayer') {
        continue; // placeholder only; apply() rejects inputs
      }
      if (cls === 'Conv2D') {
        const cfg = layer.getConfig() as Record<string, unknown>;
        const [kh, kw] = asPair(cfg.kernelSize as number | number[]);
        const [sy, sx] = asPair(cfg.strides as number | number[]);
        if (sy !== sx) {
          throw new Error(`anisotropic stride on ${layer.name}`);
        }
        if ((cfg.dataFormat ?? 'channelsLast') !== 'channelsLast') {
          throw new Error(`unsupported data format on ${layer.name}`);
        }
        const pad = convPad(kh, sy, cfg.padding as string);
        const [, inH, inW, inC] = x.shape as number[];
        const kernelT = layer.getWeights()[0];
        captured.push({
          op: 'conv2d', name: layer.name, kh, kw, inC,
          outC: dim(kernelT, 3), stride: sy, pad, inH, inW,
          kernel: (await kernelT.data()) as Float32Array,
          inputs: await splitPerImage(x, count),
        });
      } else if (cls === 'Dense') {
        const kernelT = layer.getWeights()[0];
        captured.push({
          op: 'dense', name: layer.name,
          inFeatures: dim(kernelT, 0), units: dim(kernelT, 1),
          kernel: (await kernelT.data()) as Float32Array,
          inputs: await splitPerImage(x, count),
        });
      }
      const next = layer.apply(x) as tf.Tensor;
      owned.push(next);
      x = next;
    }
  } finally {
    for (const t of owned) {
      t.dispose();
    }
  }
  return captured;
}

async function splitPerImage(x: tf.Tensor, count: number): Promise<Float32Array[]> {
  const flat = (await x.data()) as Float32Array;
  const per = flat.length / count;
  const out: Float32Array[] = [];
  for (let i = 0; i < count; i++) {
    out.push(flat.slice(i * per, (i + 1) * per));
  }
  return out;
}
