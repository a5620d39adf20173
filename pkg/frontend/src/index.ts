export {
  QNAN, addBf16, bf16FromF32Bits, isZero, mulBf16, roundToBf16,
  roundVecToBf16, toNumber, widenVec,
} from './bf16.js';
export { ConvGeometry, PatchMatrix, convOutSize, im2col, lowerKernel } from './im2col.js';
export { directConvBf16, directConvF64, gemmBf16 } from './conv.js';
export {
  FieldHistograms, exponentBandCoverage, fieldHistograms, mantissaFlatnessRatio,
} from './histogram.js';
export {
  LayerEntry, Manifest, readManifest, readTensor, stableJson, writeManifest,
  writeTensor, zeroFraction,
} from './tensorio.js';
export {
  CapturedConv, CapturedDense, CapturedLayer, buildDemoCnn, captureLayers,
  mulberry32, syntheticImages, trainDemoCnn, useCpuBackend,
} from './model.js';
export { loadModel, saveModel } from './modelio.js';
export { DEFAULT_SPEC, ExportSpec, ExportSummary, ExportedLayer, runExport } from './export.js';
