/**
 * Map checkpoint tensors onto .lgw names and axis order.
 *
 * Target layout (the single source of truth):
 *   dense/weight   (channels*samples, latent_total), rows channel-major
 *   dense/bias     (channels*samples)
 *   convN/kernel   (in_channels, out_channels, kernel)
 *   convN/bias     (out_channels)
 *
 * Torch-style checkpoints (safetensors of a ConvTranspose1d stack)
 * already use these axis orders; only names are rewritten.
 *
 * TF-style checkpoints differ in three ways, all handled here:
 *   - dense kernels are (in, out) and must be transposed;
 *   - the dense output is laid out sample-major ([samples, channels]
 *     reshape downstream), so rows are permuted to channel-major;
 *   - transpose-conv kernels are stored [K, 1, out, in] (or [K, out, in]
 *     for the 1-D op) and become (in, out, K). No tap reversal: the op
 *     scatters kernels forward on both sides.
 */

import { ExportError, NamedTensor } from "./container.js";
import { RawTensor } from "./safetensors.js";

export type Framework = "torch" | "tf";

const TORCH_PREFIXES = ["", "generator.", "g.", "model.", "module."];
const TF_PREFIXES = ["", "G/", "generator/", "Generator/"];

function numel(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function detectFramework(names: Iterable<string>): Framework {
  for (const name of names) {
    if (/(^|\/)(kernel|w)$/.test(name) || name.includes("/")) return "tf";
    if (name.endsWith(".weight") || name.endsWith(".bias")) return "torch";
  }
  throw new ExportError("cannot tell which framework wrote this checkpoint", "bad_header");
}

function findWithPrefix(
  tensors: Map<string, RawTensor>,
  prefixes: string[],
  suffixes: string[],
): { prefix: string; suffix: string; tensor: RawTensor } | null {
  for (const prefix of prefixes) {
    for (const suffix of suffixes) {
      const t = tensors.get(prefix + suffix);
      if (t) return { prefix, suffix, tensor: t };
    }
  }
  return null;
}

function transpose2d(t: RawTensor): Float32Array {
  const [rows, cols] = t.shape;
  const out = new Float32Array(rows * cols);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      out[c * rows + r] = t.data[r * cols + c];
    }
  }
  return out;
}

/** [samples*channels] row order -> [channels*samples] row order. */
function channelMajorRows(data: Float32Array, width: number, channels: number, samples: number): Float32Array {
  const out = new Float32Array(data.length);
  for (let s = 0; s < samples; s++) {
    for (let c = 0; c < channels; c++) {
      const src = (s * channels + c) * width;
      const dst = (c * samples + s) * width;
      for (let j = 0; j < width; j++) out[dst + j] = data[src + j];
    }
  }
  return out;
}

/** TF kernel [K, 1, out, in] or [K, out, in] -> (in, out, K). */
function kernelToLgw(t: RawTensor): { shape: number[]; data: Float32Array } {
  let k: number, outC: number, inC: number;
  let get: (ki: number, o: number, i: number) => number;
  if (t.shape.length === 4) {
    const [K, w, O, I] = t.shape;
    if (w !== 1) {
      throw new ExportError(`kernel width ${w} unsupported; expected 1`, "shape_mismatch");
    }
    [k, outC, inC] = [K, O, I];
    get = (ki, o, i) => t.data[((ki * 1 + 0) * outC + o) * inC + i];
  } else if (t.shape.length === 3) {
    const [K, O, I] = t.shape;
    [k, outC, inC] = [K, O, I];
    get = (ki, o, i) => t.data[(ki * outC + o) * inC + i];
  } else {
    throw new ExportError(`kernel rank ${t.shape.length} unsupported`, "shape_mismatch");
  }
  const out = new Float32Array(inC * outC * k);
  for (let i = 0; i < inC; i++) {
    for (let o = 0; o < outC; o++) {
      for (let ki = 0; ki < k; ki++) {
        out[(i * outC + o) * k + ki] = get(ki, o, i);
      }
    }
  }
  return { shape: [inC, outC, k], data: out };
}

export interface MapOptions {
  framework?: Framework;
  /** conv0 input channel count; needed to undo TF's sample-major dense layout */
  denseChannels?: number;
}

export function mapToLgw(tensors: Map<string, RawTensor>, opts: MapOptions = {}): NamedTensor[] {
  const framework = opts.framework ?? detectFramework(tensors.keys());
  return framework === "torch" ? mapTorch(tensors) : mapTf(tensors, opts);
}

function mapTorch(tensors: Map<string, RawTensor>): NamedTensor[] {
  const dense = findWithPrefix(tensors, TORCH_PREFIXES, ["dense.weight", "fc.weight", "linear.weight"]);
  if (!dense) throw new ExportError("missing dense weight (tried dense/fc/linear)", "missing_tensor");
  const { prefix } = dense;
  const stem = dense.suffix.replace(/\.weight$/, "");
  const bias = tensors.get(`${prefix}${stem}.bias`);
  if (!bias) throw new ExportError(`missing ${stem}.bias`, "missing_tensor");

  const out: NamedTensor[] = [
    { name: "dense/weight", shape: dense.tensor.shape, data: dense.tensor.data },
    { name: "dense/bias", shape: bias.shape, data: bias.data },
  ];
  for (let i = 0; ; i++) {
    const w =
      tensors.get(`${prefix}conv${i}.weight`) ??
      tensors.get(`${prefix}deconv${i}.weight`) ??
      tensors.get(`${prefix}upconv${i}.weight`);
    if (!w) {
      if (i === 0) throw new ExportError("missing conv0.weight", "missing_tensor");
      break;
    }
    const b =
      tensors.get(`${prefix}conv${i}.bias`) ??
      tensors.get(`${prefix}deconv${i}.bias`) ??
      tensors.get(`${prefix}upconv${i}.bias`);
    if (!b) throw new ExportError(`missing conv${i}.bias`, "missing_tensor");
    if (w.shape.length !== 3) {
      throw new ExportError(`conv${i}.weight must be (in, out, K), got [${w.shape}]`, "shape_mismatch");
    }
    out.push({ name: `conv${i}/kernel`, shape: w.shape, data: w.data });
    out.push({ name: `conv${i}/bias`, shape: b.shape, data: b.data });
  }
  return out;
}

function mapTf(tensors: Map<string, RawTensor>, opts: MapOptions): NamedTensor[] {
  const dense = findWithPrefix(tensors, TF_PREFIXES, [
    "dense/kernel",
    "z_project/dense/kernel",
    "project/dense/kernel",
  ]);
  if (!dense) throw new ExportError("missing dense kernel", "missing_tensor");
  const { prefix } = dense;
  const stem = dense.suffix.replace(/\/kernel$/, "");
  const bias = tensors.get(`${prefix}${stem}/bias`);
  if (!bias) throw new ExportError(`missing ${stem}/bias`, "missing_tensor");
  if (dense.tensor.shape.length !== 2) {
    throw new ExportError(`dense kernel must be 2-D, got [${dense.tensor.shape}]`, "shape_mismatch");
  }

  // collect conv layers first; conv0's input count drives the dense reorder
  const convs: Array<{ kernel: RawTensor; bias: RawTensor }> = [];
  for (let i = 0; ; i++) {
    const found = findWithPrefix(tensors, [prefix], [
      `conv${i}/kernel`,
      `upconv_${i}/kernel`,
      `upconv_${i}/conv2d_transpose/kernel`,
    ]);
    if (!found) break;
    const bstem = found.suffix.replace(/\/kernel$/, "");
    const b = tensors.get(`${prefix}${bstem}/bias`);
    if (!b) throw new ExportError(`missing ${bstem}/bias`, "missing_tensor");
    convs.push({ kernel: found.tensor, bias: b });
  }
  if (convs.length === 0) throw new ExportError("no conv kernels found", "missing_tensor");

  const kernel0 = kernelToLgw(convs[0].kernel);
  const denseChannels = opts.denseChannels ?? kernel0.shape[0];
  const [latentTotal, denseOut] = dense.tensor.shape;
  if (denseOut % denseChannels !== 0) {
    throw new ExportError(
      `dense output ${denseOut} not divisible by ${denseChannels} channels`,
      "shape_mismatch",
    );
  }
  const samples = denseOut / denseChannels;
  const transposed = transpose2d(dense.tensor); // now (denseOut, latentTotal) sample-major rows
  const reordered = channelMajorRows(transposed, latentTotal, denseChannels, samples);
  const reorderedBias = channelMajorRows(Float32Array.from(bias.data), 1, denseChannels, samples);

  const out: NamedTensor[] = [
    { name: "dense/weight", shape: [denseOut, latentTotal], data: reordered },
    { name: "dense/bias", shape: [denseOut], data: reorderedBias },
  ];
  convs.forEach((c, i) => {
    const k = i === 0 ? kernel0 : kernelToLgw(c.kernel);
    out.push({ name: `conv${i}/kernel`, shape: k.shape, data: k.data });
    out.push({ name: `conv${i}/bias`, shape: c.bias.shape, data: Float32Array.from(c.bias.data) });
  });
  return out;
}

export function totalParameters(tensors: NamedTensor[]): number {
  return tensors.reduce((a, t) => a + numel(t.shape), 0);
}
