/**
 * Minimal safetensors reader (and a writer for building test
 * checkpoints). Layout: uint64 LE header length, JSON header mapping
 * tensor name to {dtype, shape, data_offsets}, then the data section.
 * Only F32 payloads are accepted; anything else is a conversion the
 * caller should have done upstream.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { ExportError } from "./container.js";

export interface RawTensor {
  shape: number[];
  data: Float32Array;
}

export function readSafetensors(path: string): Map<string, RawTensor> {
  const raw = readFileSync(path);
  if (raw.length < 8) throw new ExportError(`${path}: too short`, "truncated");
  const headerLen = Number(raw.readBigUInt64LE(0));
  if (raw.length < 8 + headerLen) {
    throw new ExportError(`${path}: header truncated`, "truncated");
  }
  let header: Record<string, unknown>;
  try {
    header = JSON.parse(raw.subarray(8, 8 + headerLen).toString("utf-8"));
  } catch {
    throw new ExportError(`${path}: header is not valid JSON`, "bad_header");
  }
  const data = raw.subarray(8 + headerLen);
  const out = new Map<string, RawTensor>();
  for (const [name, entry] of Object.entries(header)) {
    if (name === "__metadata__") continue;
    const { dtype, shape, data_offsets } = entry as {
      dtype: string; shape: number[]; data_offsets: [number, number];
    };
    if (dtype !== "F32") {
      throw new ExportError(`${path}: tensor ${name} has dtype ${dtype}, expected F32`, "bad_dtype");
    }
    const [start, end] = data_offsets;
    if (start < 0 || end > data.length || end < start) {
      throw new ExportError(`${path}: tensor ${name} exceeds data section`, "truncated");
    }
    const bytes = Buffer.alloc(end - start);
    data.copy(bytes, 0, start, end);
    out.set(name, {
      shape,
      data: new Float32Array(bytes.buffer, 0, (end - start) / 4),
    });
  }
  return out;
}

export function writeSafetensors(path: string, tensors: Map<string, RawTensor>): void {
  const header: Record<string, unknown> = {};
  const blobs: Buffer[] = [];
  let offset = 0;
  for (const [name, t] of tensors) {
    const blob = Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength);
    header[name] = { dtype: "F32", shape: t.shape, data_offsets: [offset, offset + blob.length] };
    blobs.push(blob);
    offset += blob.length;
  }
  const headerBytes = Buffer.from(JSON.stringify(header), "utf-8");
  const lenBuf = Buffer.alloc(8);
  lenBuf.writeBigUInt64LE(BigInt(headerBytes.length), 0);
  writeFileSync(path, Buffer.concat([lenBuf, headerBytes, ...blobs]));
}
