/**
 * The simulator's on-disk workload formats.
 *
 * Tensors: raw bfloat16 bit patterns, little-endian uint16, row-major,
 * no header; file size must be exactly rows * cols * 2 bytes.
 * Manifest: JSON with model_name, dtype "bf16", and per-layer entries
 * naming the weight and input tensor files relative to the manifest.
 */

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs';
import { dirname } from 'node:path';

export interface LayerEntry {
  name: string;
  m: number;
  k: number;
  n: number;
  weights: string;
  inputs: string;
  meta: Record<string, unknown>;
}

export interface Manifest {
  model_name: string;
  dtype: 'bf16';
  layers: LayerEntry[];
}

/** Write bf16 patterns as little-endian uint16, row-major. */
export function writeTensor(path: string, data: Uint16Array): void {
  const buf = Buffer.allocUnsafe(data.length * 2);
  for (let i = 0; i < data.length; i++) {
    buf.writeUInt16LE(data[i], i * 2);
  }
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, buf);
}

/** Read a rows x cols tensor back; throws if the byte size disagrees. */
export function readTensor(path: string, rows: number, cols: number): Uint16Array {
  const buf = readFileSync(path);
  const want = rows * cols * 2;
  if (buf.length !== want) {
    throw new Error(`tensor ${path}: ${buf.length} bytes, expected ${want}`);
  }
  const out = new Uint16Array(rows * cols);
  for (let i = 0; i < out.length; i++) {
    out[i] = buf.readUInt16LE(i * 2);
  }
  return out;
}

function sortKeysDeep(value: unknown): unknown {
  if (Array.isArray(value)) {
    return value.map(sortKeysDeep);
  }
  if (value !== null && typeof value === 'object') {
    const src = value as Record<string, unknown>;
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(src).sort()) {
      out[key] = sortKeysDeep(src[key]);
    }
    return out;
  }
  return value;
}

/** Serialize with sorted keys and 2-space indent so exports are byte-stable. */
export function stableJson(value: unknown): string {
  return JSON.stringify(sortKeysDeep(value), null, 2) + '\n';
}

export function writeManifest(path: string, manifest: Manifest): void {
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, stableJson(manifest));
}

export function readManifest(path: string): Manifest {
  return JSON.parse(readFileSync(path, 'utf-8')) as Manifest;
}

/** Fraction of entries that are bf16 zero (either sign). */
export function zeroFraction(data: Uint16Array): number {
  if (data.length === 0) {
    return 0;
  }
  let zeros = 0;
  for (let i = 0; i < data.length; i++) {
    if ((data[i] & 0x7fff) === 0) {
      zeros++;
    }
  }
  return zeros / data.length;
}
