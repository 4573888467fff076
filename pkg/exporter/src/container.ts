/**
 * The .lgw container. Layout: 4-byte magic "LGW1", uint32 LE header
 * length, canonical JSON header, then packed little-endian float32
 * tensors in row-major order. Offsets are relative to the data section.
 *
 * The header is serialized canonically (keys sorted, no whitespace,
 * non-ASCII escaped) so writing the same content twice gives the same
 * bytes. That property is load-bearing: re-export must be byte-identical.
 */

import { readFileSync, writeFileSync, renameSync, mkdirSync } from "node:fs";
import { dirname, join } from "node:path";
import { randomBytes } from "node:crypto";

export const MAGIC = Buffer.from("LGW1", "ascii");
export const FORMAT_VERSION = 1;

export class ExportError extends Error {
  code: string;
  constructor(message: string, code = "export_error") {
    super(message);
    this.code = code;
  }
}

export interface NamedTensor {
  name: string;
  shape: number[];
  data: Float32Array;
}

function escapeNonAscii(json: string): string {
  // match the reference serializer, which escapes everything above 0x7f
  let out = "";
  for (const ch of json) {
    const cp = ch.codePointAt(0)!;
    if (cp < 0x80) {
      out += ch;
    } else if (cp > 0xffff) {
      const h = Math.floor((cp - 0x10000) / 0x400) + 0xd800;
      const l = ((cp - 0x10000) % 0x400) + 0xdc00;
      out += "\\u" + h.toString(16).padStart(4, "0") + "\\u" + l.toString(16).padStart(4, "0");
    } else {
      out += "\\u" + cp.toString(16).padStart(4, "0");
    }
  }
  return out;
}

function sortValue(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortValue);
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
    const out: Record<string, unknown> = {};
    for (const [k, v] of entries) out[k] = sortValue(v);
    return out;
  }
  if (typeof value === "number" && !Number.isFinite(value)) {
    throw new ExportError("non-finite number in header", "bad_header");
  }
  return value;
}

export function canonicalJson(value: unknown): string {
  return escapeNonAscii(JSON.stringify(sortValue(value)));
}

function numel(shape: number[]): number {
  let n = 1;
  for (const s of shape) {
    if (!Number.isInteger(s) || s < 0) {
      throw new ExportError(`bad dimension ${s} in shape [${shape}]`, "bad_header");
    }
    n *= s;
  }
  return n;
}

export function writeContainer(
  path: string,
  headerExtra: Record<string, unknown>,
  tensors: NamedTensor[],
): void {
  const table: Array<Record<string, unknown>> = [];
  const blobs: Buffer[] = [];
  let offset = 0;
  for (const t of tensors) {
    if (t.data.length !== numel(t.shape)) {
      throw new ExportError(
        `tensor ${t.name}: ${t.data.length} values do not fill shape [${t.shape}]`,
        "shape_mismatch",
      );
    }
    for (const v of t.data) {
      if (!Number.isFinite(v)) {
        throw new ExportError(`tensor ${t.name} contains non-finite values`, "non_finite");
      }
    }
    const blob = Buffer.from(t.data.buffer, t.data.byteOffset, t.data.byteLength);
    table.push({ name: t.name, shape: t.shape, dtype: "f32", offset });
    blobs.push(blob);
    offset += blob.length;
  }
  const header: Record<string, unknown> = { ...headerExtra };
  header["format"] = "lgw";
  header["version"] = FORMAT_VERSION;
  header["tensors"] = table;
  const headerBytes = Buffer.from(canonicalJson(header), "utf-8");
  const lenBuf = Buffer.alloc(4);
  lenBuf.writeUInt32LE(headerBytes.length, 0);
  const payload = Buffer.concat([MAGIC, lenBuf, headerBytes, ...blobs]);

  mkdirSync(dirname(path) || ".", { recursive: true });
  const tmp = join(dirname(path) || ".", `.${randomBytes(6).toString("hex")}.tmp`);
  writeFileSync(tmp, payload);
  renameSync(tmp, path);
}

export interface Container {
  header: Record<string, unknown>;
  tensors: Map<string, { shape: number[]; data: Float32Array }>;
}

export function readContainer(path: string): Container {
  const raw = readFileSync(path);
  if (raw.length < 8) throw new ExportError(`${path}: too short`, "truncated");
  if (!raw.subarray(0, 4).equals(MAGIC)) {
    throw new ExportError(`${path}: bad magic`, "bad_magic");
  }
  const headerLen = raw.readUInt32LE(4);
  if (raw.length < 8 + headerLen) {
    throw new ExportError(`${path}: header truncated`, "truncated");
  }
  let header: Record<string, unknown>;
  try {
    header = JSON.parse(raw.subarray(8, 8 + headerLen).toString("utf-8"));
  } catch (e) {
    throw new ExportError(`${path}: header is not valid JSON`, "bad_header");
  }
  if (header === null || typeof header !== "object" || header["format"] !== "lgw") {
    throw new ExportError(`${path}: missing format marker`, "bad_header");
  }
  const table = header["tensors"];
  if (!Array.isArray(table)) {
    throw new ExportError(`${path}: missing tensor table`, "bad_header");
  }
  const data = raw.subarray(8 + headerLen);
  const tensors = new Map<string, { shape: number[]; data: Float32Array }>();
  for (const entry of table) {
    const { name, shape, dtype, offset } = entry as {
      name: string; shape: number[]; dtype: string; offset: number;
    };
    if (dtype !== "f32") {
      throw new ExportError(`${path}: unsupported dtype ${dtype}`, "bad_header");
    }
    const count = numel(shape);
    const end = offset + 4 * count;
    if (offset < 0 || end > data.length) {
      throw new ExportError(`${path}: tensor ${name} exceeds data section`, "truncated");
    }
    // copy out of the file buffer; alignment of subarray is not guaranteed
    const bytes = Buffer.alloc(4 * count);
    data.copy(bytes, 0, offset, end);
    const arr = new Float32Array(bytes.buffer, 0, count);
    for (const v of arr) {
      if (!Number.isFinite(v)) {
        throw new ExportError(`${path}: tensor ${name} contains non-finite values`, "non_finite");
      }
    }
    tensors.set(name, { shape, data: arr });
  }
  return { header, tensors };
}
