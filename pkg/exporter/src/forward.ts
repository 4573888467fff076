/**
 * Fixture forward pass on tfjs. This deliberately reuses the framework's
 * own transposed-convolution kernel rather than reimplementing one, so a
 * fixture cross-checks two independent conv implementations.
 *
 * Data layout notes: .lgw tensors are channel-major (C, L); tfjs wants
 * NHWC, so each layer runs as [1, 1, L, C] with a [1, K, out, in]
 * filter and SAME padding, then transposes back for storage.
 */

import * as tf from "@tensorflow/tfjs";
import { ExportError, NamedTensor } from "./container.js";
import { GeneratorSpec } from "./spec.js";

tf.enableProdMode(); // silences the install-tfjs-node advert on every run

export interface StageCapture {
  pre: { shape: number[]; data: Float32Array };
  post: { shape: number[]; data: Float32Array };
}

export interface ForwardCapture {
  dense: StageCapture;
  layers: StageCapture[];
  waveform: Float32Array;
}

function toChannelMajor(t4d: tf.Tensor4D): { shape: number[]; data: Float32Array } {
  // [1, 1, L, C] -> (C, L)
  const [, , L, C] = t4d.shape;
  const cm = tf.transpose(tf.reshape(t4d, [L, C]), [1, 0]);
  return { shape: [C, L], data: cm.dataSync() as Float32Array };
}

export function runForward(
  tensors: NamedTensor[],
  spec: GeneratorSpec,
  input: Float32Array,
): ForwardCapture {
  const byName = new Map(tensors.map((t) => [t.name, t]));
  const need = (name: string): NamedTensor => {
    const t = byName.get(name);
    if (!t) throw new ExportError(`missing tensor ${name}`, "missing_tensor");
    return t;
  };
  const latentTotal = spec.latent_dim + spec.code_dim;
  if (input.length !== latentTotal) {
    throw new ExportError(
      `latent width ${input.length} does not match spec input width ${latentTotal}`,
      "shape_mismatch",
    );
  }
  const { channels, samples } = spec.dense_out;

  // manual scope instead of tf.tidy: the capture we return is plain data,
  // not a tensor container
  tf.engine().startScope();
  try {
    const denseW = need("dense/weight");
    const x = tf.tensor2d(input, [1, latentTotal]);
    const w = tf.tensor2d(denseW.data, [channels * samples, latentTotal]);
    const b = tf.tensor1d(need("dense/bias").data);
    const flat = tf.add(tf.matMul(x, w, false, true), b); // [1, C*S]
    const densePreCS = tf.reshape(flat, [channels, samples]);
    const densePostCS = tf.relu(densePreCS);
    const dense: StageCapture = {
      pre: { shape: [channels, samples], data: densePreCS.dataSync() as Float32Array },
      post: { shape: [channels, samples], data: densePostCS.dataSync() as Float32Array },
    };

    // NHWC with a singleton height: [1, 1, samples, channels]
    let current = tf.reshape(tf.transpose(densePostCS, [1, 0]), [1, 1, samples, channels]) as tf.Tensor4D;
    let length = samples;
    const layers: StageCapture[] = [];
    spec.layers.forEach((layer, i) => {
      const kt = need(`conv${i}/kernel`);
      const [inC, outC, K] = kt.shape;
      // (in, out, K) -> [1, K, out, in]
      const filter = tf
        .transpose(tf.tensor3d(kt.data, [inC, outC, K]), [2, 1, 0])
        .reshape([1, K, outC, inC]) as tf.Tensor4D;
      const outLen = length * layer.stride;
      const conv = tf.conv2dTranspose(
        current,
        filter,
        [1, 1, outLen, outC],
        [1, layer.stride],
        "same",
      );
      const pre = tf.add(conv, tf.tensor1d(need(`conv${i}/bias`).data)) as tf.Tensor4D;
      const post = (layer.activation === "relu" ? tf.relu(pre) : tf.tanh(pre)) as tf.Tensor4D;
      layers.push({ pre: toChannelMajor(pre), post: toChannelMajor(post) });
      current = post;
      length = outLen;
    });

    const last = layers[layers.length - 1].post;
    if (last.shape[0] !== 1) {
      throw new ExportError(
        `final layer has ${last.shape[0]} channels; expected a single waveform channel`,
        "shape_mismatch",
      );
    }
    return { dense, layers, waveform: last.data.slice(0, last.shape[1]) };
  } finally {
    tf.engine().endScope();
  }
}
