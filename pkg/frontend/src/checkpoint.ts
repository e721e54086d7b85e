/**
 * Coefficient checkpoint files: 16-byte header (magic "VFPD", uint32 LE
 * version, n_h, n_x) followed by the row-major float64 LE coefficient
 * matrix, row k = Hermite mode k.
 */

import { readFileSync } from "node:fs";

export const CHECKPOINT_MAGIC = "VFPD";
export const CHECKPOINT_VERSION = 1;

export interface Checkpoint {
  nH: number;
  nX: number;
  /** row-major (nH x nX) */
  data: Float64Array;
}

export function decodeCheckpoint(buffer: Buffer, source = "<buffer>"): Checkpoint {
  if (buffer.length < 16 || buffer.toString("ascii", 0, 4) !== CHECKPOINT_MAGIC) {
    throw new Error(`${source}: not a coefficient checkpoint`);
  }
  const version = buffer.readUInt32LE(4);
  if (version !== CHECKPOINT_VERSION) {
    throw new Error(`${source}: unsupported checkpoint version ${version}`);
  }
  const nH = buffer.readUInt32LE(8);
  const nX = buffer.readUInt32LE(12);
  const expected = 16 + 8 * nH * nX;
  if (buffer.length !== expected) {
    throw new Error(`${source}: truncated checkpoint (${buffer.length} bytes, expected ${expected})`);
  }
  const data = new Float64Array(nH * nX);
  for (let i = 0; i < data.length; i++) {
    data[i] = buffer.readDoubleLE(16 + 8 * i);
  }
  return { nH, nX, data };
}

export function readCheckpoint(path: string): Checkpoint {
  return decodeCheckpoint(readFileSync(path), path);
}

export function encodeCheckpoint(checkpoint: Checkpoint): Buffer {
  const buffer = Buffer.alloc(16 + 8 * checkpoint.data.length);
  buffer.write(CHECKPOINT_MAGIC, 0, "ascii");
  buffer.writeUInt32LE(CHECKPOINT_VERSION, 4);
  buffer.writeUInt32LE(checkpoint.nH, 8);
  buffer.writeUInt32LE(checkpoint.nX, 12);
  checkpoint.data.forEach((value, i) => buffer.writeDoubleLE(value, 16 + 8 * i));
  return buffer;
}

export function mode(checkpoint: Checkpoint, k: number): Float64Array {
  return checkpoint.data.subarray(k * checkpoint.nX, (k + 1) * checkpoint.nX);
}
