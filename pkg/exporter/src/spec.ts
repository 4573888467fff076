/**
 * Architecture description mirrored from the primary package, plus
 * inference of that description from the tensors actually present in a
 * checkpoint. Strides are not recoverable from weight shapes, so they
 * arrive as an option (default 4, the standard upsampling factor).
 */

import { createHash } from "node:crypto";
import { canonicalJson, ExportError, NamedTensor } from "./container.js";

export interface LayerSpec {
  in_channels: number;
  out_channels: number;
  kernel: number;
  stride: number;
  activation: "relu" | "tanh";
}

export interface GeneratorSpec {
  latent_dim: number;
  code_dim: number;
  dense_out: { channels: number; samples: number };
  layers: LayerSpec[];
}

export function specHash(spec: GeneratorSpec): string {
  const canon = canonicalJson(spec);
  return "sha256:" + createHash("sha256").update(canon, "utf-8").digest("hex");
}

export function outputSamples(spec: GeneratorSpec): number {
  let n = spec.dense_out.samples;
  for (const layer of spec.layers) n *= layer.stride;
  return n;
}

export interface InferOptions {
  stride?: number;
  codeDim?: number;
}

/**
 * Build the spec from mapped tensors (already in .lgw layout: dense
 * weight (C*S, latent_total), conv kernels (in, out, K)).
 */
export function inferSpec(tensors: NamedTensor[], opts: InferOptions = {}): GeneratorSpec {
  const stride = opts.stride ?? 4;
  const codeDim = opts.codeDim ?? 0;
  const byName = new Map(tensors.map((t) => [t.name, t]));
  const denseW = byName.get("dense/weight");
  if (!denseW) throw new ExportError("checkpoint has no dense weight", "missing_tensor");
  if (denseW.shape.length !== 2) {
    throw new ExportError(`dense weight must be 2-D, got [${denseW.shape}]`, "shape_mismatch");
  }
  const conv0 = byName.get("conv0/kernel");
  if (!conv0) throw new ExportError("checkpoint has no conv layers", "missing_tensor");
  const denseChannels = conv0.shape[0];
  const denseOut = denseW.shape[0];
  if (denseOut % denseChannels !== 0) {
    throw new ExportError(
      `dense output ${denseOut} is not a multiple of conv0 input channels ${denseChannels}`,
      "shape_mismatch",
    );
  }
  const layers: LayerSpec[] = [];
  for (let i = 0; ; i++) {
    const k = byName.get(`conv${i}/kernel`);
    if (!k) break;
    if (k.shape.length !== 3) {
      throw new ExportError(`conv${i} kernel must be 3-D, got [${k.shape}]`, "shape_mismatch");
    }
    layers.push({
      in_channels: k.shape[0],
      out_channels: k.shape[1],
      kernel: k.shape[2],
      stride,
      activation: "relu",
    });
  }
  if (layers.length === 0) throw new ExportError("no conv layers found", "missing_tensor");
  layers[layers.length - 1].activation = "tanh";
  return {
    latent_dim: denseW.shape[1] - codeDim,
    code_dim: codeDim,
    dense_out: { channels: denseChannels, samples: denseOut / denseChannels },
    layers,
  };
}

/** Check that the mapped tensor set is complete and consistent with a spec. */
export function validateAgainstSpec(tensors: NamedTensor[], spec: GeneratorSpec): void {
  const byName = new Map(tensors.map((t) => [t.name, t]));
  const expect = (name: string, shape: number[]) => {
    const t = byName.get(name);
    if (!t) throw new ExportError(`missing tensor ${name}`, "missing_tensor");
    if (t.shape.length !== shape.length || t.shape.some((s, i) => s !== shape[i])) {
      throw new ExportError(
        `tensor ${name}: shape [${t.shape}] does not match spec [${shape}]`,
        "shape_mismatch",
      );
    }
  };
  const denseOut = spec.dense_out.channels * spec.dense_out.samples;
  expect("dense/weight", [denseOut, spec.latent_dim + spec.code_dim]);
  expect("dense/bias", [denseOut]);
  let prev = spec.dense_out.channels;
  spec.layers.forEach((layer, i) => {
    if (layer.in_channels !== prev) {
      throw new ExportError(
        `conv${i}: in_channels ${layer.in_channels} does not chain from ${prev}`,
        "shape_mismatch",
      );
    }
    expect(`conv${i}/kernel`, [layer.in_channels, layer.out_channels, layer.kernel]);
    expect(`conv${i}/bias`, [layer.out_channels]);
    prev = layer.out_channels;
  });
}
