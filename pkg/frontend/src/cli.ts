#!/usr/bin/env node
/** CLI around runExport; exit 0 on success, 2 on bad flags, 1 on failure. */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { DEFAULT_SPEC, ExportSpec, runExport } from './export.js';

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .usage('$0 --out DIR [options]\n\n'
      + 'Export CNN weights and per-image post-ReLU activations as bf16\n'
      + 'GEMM workloads (manifest plus raw tensors) for the systolic-array\n'
      + 'switching simulator.')
    .option('model', {
      choices: ['demo-cnn', 'resnet50', 'mobilenet'] as const,
      default: DEFAULT_SPEC.model,
      describe: 'demo-cnn trains a small local model; others need --model-dir',
    })
    .option('model-dir', {
      type: 'string',
      describe: 'directory with tfjs model.json + weights for non-demo models',
    })
    .option('images', { type: 'number', default: DEFAULT_SPEC.images })
    .option('max-layers', { type: 'number', default: DEFAULT_SPEC.maxLayers })
    .option('layer-filter', { type: 'string', describe: 'regex on layer names' })
    .option('out', { type: 'string', demandOption: true })
    .option('seed', { type: 'number', default: DEFAULT_SPEC.seed })
    .option('train-steps', { type: 'number', default: DEFAULT_SPEC.trainSteps })
    .strict()
    .fail((msg, err) => {
      console.error(msg ?? err?.message);
      process.exit(2);
    })
    .parse();

  const spec: ExportSpec = {
    model: argv.model,
    modelDir: argv['model-dir'],
    images: argv.images,
    maxLayers: argv['max-layers'],
    layerFilter: argv['layer-filter'],
    outDir: argv.out,
    seed: argv.seed,
    trainSteps: argv['train-steps'],
  };
  const summary = await runExport(spec);
  console.log(`wrote ${summary.manifestPath}`);
  for (const layer of summary.layers) {
    const zf = layer.zeroFractions
      .map((f) => f.toFixed(3))
      .join(' ');
    console.log(`  ${layer.name} (${layer.op}): m=${layer.m} k=${layer.k} `
      + `n=${layer.n}, ${layer.images} image(s), zero fractions [${zf}]`);
  }
}

main().catch((err: Error) => {
  console.error(err.message);
  process.exit(1);
});
