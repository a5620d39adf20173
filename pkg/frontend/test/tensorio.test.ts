import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, describe, expect, it } from 'vitest';

import {
  Manifest, readManifest, readTensor, stableJson, writeManifest, writeTensor,
  zeroFraction,
} from '../src/tensorio.js';

const dir = mkdtempSync(join(tmpdir(), 'satoggle-io-'));
afterAll(() => rmSync(dir, { recursive: true, force: true }));

describe('tensor files', () => {
  it('round-trips bit patterns', () => {
    const data = new Uint16Array([0x0000, 0x8000, 0x3f80, 0xffff, 0x1234, 0x7fc0]);
    const path = join(dir, 't.bin');
    writeTensor(path, data);
    expect(readTensor(path, 2, 3)).toEqual(data);
  });

  it('writes little-endian regardless of platform', () => {
    const path = join(dir, 'le.bin');
    writeTensor(path, new Uint16Array([0x1234]));
    expect(Array.from(readFileSync(path))).toEqual([0x34, 0x12]);
  });

  it('rejects size mismatches', () => {
    const path = join(dir, 'short.bin');
    writeTensor(path, new Uint16Array(5));
    expect(() => readTensor(path, 2, 3)).toThrow(/expected 12/);
  });
});

describe('manifest', () => {
  it('round-trips and keys stay sorted', () => {
    const manifest: Manifest = {
      model_name: 'demo-cnn',
      dtype: 'bf16',
      layers: [{
        name: 'conv1.img0', m: 4, k: 9, n: 2,
        weights: 'conv1.weights.bin', inputs: 'conv1.img0.inputs.bin',
        meta: { zero_fraction: 0.25, op: 'conv2d' },
      }],
    };
    const path = join(dir, 'manifest.json');
    writeManifest(path, manifest);
    expect(readManifest(path)).toEqual(manifest);
    const text = readFileSync(path, 'utf-8');
    expect(text.indexOf('"dtype"')).toBeLessThan(text.indexOf('"layers"'));
    expect(text.indexOf('"layers"')).toBeLessThan(text.indexOf('"model_name"'));
    expect(text.endsWith('\n')).toBe(true);
  });

  it('stableJson sorts nested keys deterministically', () => {
    expect(stableJson({ b: 1, a: { d: [2, { z: 1, y: 2 }], c: 3 } }))
      .toBe(stableJson({ a: { c: 3, d: [2, { y: 2, z: 1 }] }, b: 1 }));
  });
});

describe('zeroFraction', () => {
  it('counts both zero signs and nothing else', () => {
    expect(zeroFraction(new Uint16Array([0x0000, 0x8000, 0x3f80, 0x0001]))).toBe(0.5);
    expect(zeroFraction(new Uint16Array())).toBe(0);
  });
});
