/**
 * The two conversion entry points: checkpoint to .lgw, and checkpoint to
 * golden fixture. This package converts and replays; it never analyzes.
 */

import { existsSync } from "node:fs";
import { basename, extname } from "node:path";
import { ExportError, writeContainer, NamedTensor } from "./container.js";
import { detectFramework, Framework, mapToLgw } from "./mapping.js";
import { readSafetensors, RawTensor } from "./safetensors.js";
import { readTfjsModel } from "./tfjsmodel.js";
import { GeneratorSpec, inferSpec, specHash, validateAgainstSpec } from "./spec.js";
import { runForward } from "./forward.js";
import { latentFromSeed } from "./latent.js";

export interface ExportOptions {
  stride?: number;
  codeDim?: number;
  modelName?: string;
  trainedSteps?: number;
  framework?: Framework;
}

export function loadCheckpoint(path: string): Map<string, RawTensor> {
  if (!existsSync(path)) {
    throw new ExportError(`${path}: no such file`, "not_found");
  }
  const ext = extname(path).toLowerCase();
  if (ext === ".safetensors") return readSafetensors(path);
  if (ext === ".json") return readTfjsModel(path);
  throw new ExportError(
    `${path}: unrecognized checkpoint kind ${ext || "(no extension)"}; expected .safetensors or a tfjs model .json`,
    "bad_header",
  );
}

function prepare(checkpointPath: string, opts: ExportOptions): {
  tensors: NamedTensor[];
  spec: GeneratorSpec;
  framework: Framework;
} {
  const raw = loadCheckpoint(checkpointPath);
  const framework = opts.framework ?? detectFramework(raw.keys());
  const tensors = mapToLgw(raw, { framework });
  const spec = inferSpec(tensors, { stride: opts.stride, codeDim: opts.codeDim });
  validateAgainstSpec(tensors, spec);
  return { tensors, spec, framework };
}

export function exportCheckpoint(
  checkpointPath: string,
  outPath: string,
  opts: ExportOptions = {},
): GeneratorSpec {
  const { tensors, spec } = prepare(checkpointPath, opts);
  const header = {
    model: {
      model_name: opts.modelName ?? basename(checkpointPath, extname(checkpointPath)),
      trained_steps: opts.trainedSteps ?? 0,
    },
    spec,
    spec_hash: specHash(spec),
  };
  writeContainer(outPath, header, tensors);
  return spec;
}

export function emitFixture(
  checkpointPath: string,
  seed: number,
  outPath: string,
  opts: ExportOptions = {},
): GeneratorSpec {
  const { tensors, spec, framework } = prepare(checkpointPath, opts);
  const width = spec.latent_dim + spec.code_dim;
  const input = latentFromSeed(seed, width);
  const capture = runForward(tensors, spec, input);

  const fixtureTensors: NamedTensor[] = [];
  const code = input.slice(0, spec.code_dim);
  const z = input.slice(spec.code_dim);
  fixtureTensors.push({ name: "fixture/z", shape: [spec.latent_dim], data: z });
  if (spec.code_dim > 0) {
    fixtureTensors.push({ name: "fixture/code", shape: [spec.code_dim], data: code });
  }
  fixtureTensors.push(
    { name: "dense/pre", shape: capture.dense.pre.shape, data: capture.dense.pre.data },
    { name: "dense/post", shape: capture.dense.post.shape, data: capture.dense.post.data },
  );
  capture.layers.forEach((stage, i) => {
    fixtureTensors.push(
      { name: `conv${i}/pre`, shape: stage.pre.shape, data: stage.pre.data },
      { name: `conv${i}/post`, shape: stage.post.shape, data: stage.post.data },
    );
  });
  fixtureTensors.push({
    name: "fixture/waveform",
    shape: [capture.waveform.length],
    data: capture.waveform,
  });

  const header = {
    fixture: {
      framework,
      checkpoint: basename(checkpointPath),
      seed,
    },
    spec,
    spec_hash: specHash(spec),
  };
  writeContainer(outPath, header, fixtureTensors);
  return spec;
}
