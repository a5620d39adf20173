/**
 * Load and save tfjs layers-model artifacts on the local filesystem.
 *
 * Plain tfjs ships no file:// IO handler (that lives in tfjs-node), so
 * these are minimal handlers over model.json plus one weights.bin.
 */

import * as tf from '@tensorflow/tfjs';
import { readFileSync, writeFileSync, mkdirSync } from 'node:fs';
import { join } from 'node:path';

function toArrayBuffer(data: ArrayBuffer | ArrayBuffer[]): ArrayBuffer {
  if (!Array.isArray(data)) {
    return data;
  }
  const total = data.reduce((s, b) => s + b.byteLength, 0);
  const out = new Uint8Array(total);
  let off = 0;
  for (const b of data) {
    out.set(new Uint8Array(b), off);
    off += b.byteLength;
  }
  return out.buffer;
}

export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save({
    save: async (artifacts) => {
      const weightData = toArrayBuffer(artifacts.weightData as ArrayBuffer | ArrayBuffer[]);
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(weightData));
      const meta = {
        format: 'layers-model',
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      };
      writeFileSync(join(dir, 'model.json'), JSON.stringify(meta, null, 2));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } };
    },
  });
}

interface WeightsGroup {
  paths: string[];
  weights: tf.io.WeightsManifestEntry[];
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const metaPath = join(dir, 'model.json');
  const meta = JSON.parse(readFileSync(metaPath, 'utf-8')) as {
    modelTopology: object;
    weightsManifest: WeightsGroup[];
  };
  if (!meta.modelTopology || !meta.weightsManifest) {
    throw new Error(`${metaPath} is not a tfjs layers-model description`);
  }
  const weightSpecs = meta.weightsManifest.flatMap((g) => g.weights);
  const parts = meta.weightsManifest
    .flatMap((g) => g.paths)
    .map((p) => readFileSync(join(dir, p)));
  const blob = Buffer.concat(parts);
  const weightData = blob.buffer.slice(blob.byteOffset, blob.byteOffset + blob.byteLength);
  return tf.loadLayersModel({
    load: async () => ({ modelTopology: meta.modelTopology, weightSpecs, weightData }),
  });
}
