/**
 * Reader for tfjs layers-model artifacts: a model.json whose
 * weightsManifest lists weight specs and shard files holding the
 * concatenated binary data. Shards live next to the model.json.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { ExportError } from "./container.js";
import { RawTensor } from "./safetensors.js";

interface WeightSpec {
  name: string;
  shape: number[];
  dtype: string;
}

interface ManifestGroup {
  paths: string[];
  weights: WeightSpec[];
}

export function readTfjsModel(modelJsonPath: string): Map<string, RawTensor> {
  let parsed: { weightsManifest?: ManifestGroup[] };
  try {
    parsed = JSON.parse(readFileSync(modelJsonPath, "utf-8"));
  } catch (e) {
    throw new ExportError(`${modelJsonPath}: cannot parse model.json: ${e}`, "bad_header");
  }
  const manifest = parsed.weightsManifest;
  if (!Array.isArray(manifest) || manifest.length === 0) {
    throw new ExportError(`${modelJsonPath}: no weightsManifest`, "bad_header");
  }
  const dir = dirname(modelJsonPath);
  const out = new Map<string, RawTensor>();
  for (const group of manifest) {
    const data = Buffer.concat(group.paths.map((p) => readFileSync(join(dir, p))));
    let offset = 0;
    for (const spec of group.weights) {
      if (spec.dtype !== "float32") {
        throw new ExportError(
          `${modelJsonPath}: weight ${spec.name} has dtype ${spec.dtype}, expected float32`,
          "bad_dtype",
        );
      }
      const count = spec.shape.reduce((a, b) => a * b, 1);
      const end = offset + 4 * count;
      if (end > data.length) {
        throw new ExportError(`${modelJsonPath}: weight ${spec.name} exceeds shard data`, "truncated");
      }
      const bytes = Buffer.alloc(4 * count);
      data.copy(bytes, 0, offset, end);
      out.set(spec.name, { shape: spec.shape, data: new Float32Array(bytes.buffer, 0, count) });
      offset = end;
    }
  }
  return out;
}
