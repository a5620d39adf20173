/**
 * Turn a CNN into the simulator's workload format: one GEMM per
 * (conv/dense layer, image), weights im2col-lowered to K x N, inputs to
 * M x K, everything rounded to bf16 and written as raw tensors plus a
 * manifest.
 */

import * as tf from '@tensorflow/tfjs';
import { join } from 'node:path';

import { roundVecToBf16 } from './bf16.js';
import { im2col, lowerKernel } from './im2col.js';
import {
  CapturedLayer, IMAGE_C, IMAGE_H, IMAGE_W, buildDemoCnn, captureLayers,
  mulberry32, syntheticImages, trainDemoCnn, useCpuBackend,
} from './model.js';
import { loadModel } from './modelio.js';
import { LayerEntry, Manifest, writeManifest, writeTensor, zeroFraction } from './tensorio.js';

export interface ExportSpec {
  /** demo-cnn builds and briefly trains a local model; other ids load modelDir. */
  model: 'demo-cnn' | 'resnet50' | 'mobilenet';
  /** Directory with tfjs model.json + weights, for non-demo models. */
  modelDir?: string;
  /** Synthetic image count (activations are captured per image). */
  images: number;
  /** Keep only the first N conv/dense layers. */
  maxLayers: number;
  /** Optional regex on layer names, applied before maxLayers. */
  layerFilter?: string;
  outDir: string;
  seed: number;
  /** SGD steps for the demo model. */
  trainSteps: number;
}

export const DEFAULT_SPEC: Omit<ExportSpec, 'outDir'> = {
  model: 'demo-cnn', images: 4, maxLayers: 10, seed: 1234, trainSteps: 20,
};

export interface ExportedLayer {
  name: string;
  op: 'conv2d' | 'dense';
  m: number;
  k: number;
  n: number;
  images: number;
  zeroFractions: number[]; // of the M x K matrix, per image
}

export interface ExportSummary {
  manifestPath: string;
  modelName: string;
  layers: ExportedLayer[];
}

async function resolveModel(spec: ExportSpec): Promise<tf.LayersModel> {
  if (spec.model === 'demo-cnn') {
    const model = buildDemoCnn(spec.seed);
    if (spec.trainSteps > 0) {
      trainDemoCnn(model, spec.seed, spec.trainSteps);
    }
    return model;
  }
  if (!spec.modelDir) {
    throw new Error(
      `model ${spec.model} needs --model-dir pointing at local tfjs artifacts `
      + '(pretrained weights are not fetched over the network)');
  }
  return loadModel(spec.modelDir);
}

interface Lowered {
  weights: Uint16Array; // K x N
  m: number;
  k: number;
  n: number;
  perImage: { matrix: Uint16Array; sourceZeroFraction: number }[];
  meta: Record<string, unknown>;
}

function lowerLayer(layer: CapturedLayer): Lowered {
  if (layer.op === 'conv2d') {
    const { kh, kw, inC, outC, stride, pad, inH, inW } = layer;
    const weights = lowerKernel(roundVecToBf16(layer.kernel), kh, kw, inC, outC);
    const perImage = layer.inputs.map((img) => {
      const quant = roundVecToBf16(img);
      const patches = im2col(quant, inH, inW, inC, { kh, kw, stride, pad });
      return { matrix: patches.data, sourceZeroFraction: zeroFraction(quant) };
    });
    const m = perImage.length > 0
      ? perImage[0].matrix.length / (kh * kw * inC)
      : 0;
    return {
      weights, m, k: kh * kw * inC, n: outC, perImage,
      meta: {
        op: 'conv2d', kernel: [kh, kw], stride, pad,
        input_shape: [inH, inW, inC],
      },
    };
  }
  const weights = roundVecToBf16(layer.kernel);
  const perImage = layer.inputs.map((vec) => {
    const quant = roundVecToBf16(vec);
    return { matrix: quant, sourceZeroFraction: zeroFraction(quant) };
  });
  return {
    weights, m: 1, k: layer.inFeatures, n: layer.units, perImage,
    meta: { op: 'dense', input_features: layer.inFeatures },
  };
}

export async function runExport(spec: ExportSpec): Promise<ExportSummary> {
  if (spec.images < 1) {
    throw new Error('need at least one image');
  }
  if (spec.maxLayers < 1) {
    throw new Error('need at least one layer');
  }
  await useCpuBackend();
  const model = await resolveModel(spec);
  const pixels = syntheticImages(spec.images, mulberry32(spec.seed ^ 0x9e3779b9));
  const imagesT = tf.tensor4d(pixels, [spec.images, IMAGE_H, IMAGE_W, IMAGE_C]);
  let captured: CapturedLayer[];
  try {
    captured = await captureLayers(model, imagesT);
  } finally {
    imagesT.dispose();
  }

  const filter = spec.layerFilter ? new RegExp(spec.layerFilter) : null;
  const kept = captured
    .filter((l) => (filter ? filter.test(l.name) : true))
    .slice(0, spec.maxLayers);
  if (kept.length === 0) {
    throw new Error('layer filter matched nothing');
  }

  const entries: LayerEntry[] = [];
  const summary: ExportedLayer[] = [];
  for (const layer of kept) {
    const low = lowerLayer(layer);
    const weightsFile = `${layer.name}.weights.bin`;
    writeTensor(join(spec.outDir, weightsFile), low.weights);
    const fractions: number[] = [];
    low.perImage.forEach((img, j) => {
      const inputsFile = `${layer.name}.img${j}.inputs.bin`;
      writeTensor(join(spec.outDir, inputsFile), img.matrix);
      const zf = zeroFraction(img.matrix);
      fractions.push(zf);
      entries.push({
        name: `${layer.name}.img${j}`,
        m: low.m, k: low.k, n: low.n,
        weights: weightsFile, inputs: inputsFile,
        meta: {
          ...low.meta,
          model: spec.model, seed: spec.seed, image: j,
          zero_fraction: zf, source_zero_fraction: img.sourceZeroFraction,
        },
      });
    });
    summary.push({
      name: layer.name, op: layer.op, m: low.m, k: low.k, n: low.n,
      images: low.perImage.length, zeroFractions: fractions,
    });
  }

  const manifest: Manifest = {
    model_name: spec.model, dtype: 'bf16', layers: entries,
  };
  const manifestPath = join(spec.outDir, 'manifest.json');
  writeManifest(manifestPath, manifest);
  return { manifestPath, modelName: spec.model, layers: summary };
}
