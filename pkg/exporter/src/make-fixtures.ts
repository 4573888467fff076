/**
 * Build the committed golden fixtures: a small synthetic torch-layout
 * checkpoint, its .lgw export, and a seeded forward-pass fixture. The
 * primary package's test suite replays the fixture against its own
 * forward pass, so these files are the cross-implementation contract.
 *
 * Deterministic by construction; rerunning must reproduce identical
 * bytes.
 */

import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { mkdirSync } from "node:fs";
import { writeSafetensors, RawTensor } from "./safetensors.js";
import { exportCheckpoint, emitFixture } from "./export.js";
import { splitmix64 } from "./latent.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const FIXTURE_DIR = join(HERE, "..", "fixtures");

function gaussians(seed: number, count: number, scale: number): Float32Array {
  // Box-Muller over splitmix64 uniforms
  const stream = splitmix64(seed);
  const uniform = () => (Number(stream.next().value >> 11n) + 0.5) / 2 ** 53;
  const out = new Float32Array(count);
  for (let i = 0; i < count; i += 2) {
    const r = Math.sqrt(-2 * Math.log(uniform()));
    const theta = 2 * Math.PI * uniform();
    out[i] = scale * r * Math.cos(theta);
    if (i + 1 < count) out[i + 1] = scale * r * Math.sin(theta);
  }
  return out;
}

function constant(count: number, value: number): Float32Array {
  return new Float32Array(count).fill(value);
}

export function buildTinyCheckpoint(path: string): void {
  const latent = 16;
  const denseChannels = 32;
  const denseSamples = 16;
  const chain = [32, 16, 8, 1];
  const kernel = 25;

  const tensors = new Map<string, RawTensor>();
  const denseOut = denseChannels * denseSamples;
  tensors.set("dense.weight", {
    shape: [denseOut, latent],
    data: gaussians(101, denseOut * latent, 0.8 / Math.sqrt(latent)),
  });
  tensors.set("dense.bias", { shape: [denseOut], data: constant(denseOut, 0.01) });
  for (let i = 0; i + 1 < chain.length; i++) {
    const [inC, outC] = [chain[i], chain[i + 1]];
    tensors.set(`conv${i}.weight`, {
      shape: [inC, outC, kernel],
      data: gaussians(200 + i, inC * outC * kernel, 0.8 / Math.sqrt(inC * kernel / 4)),
    });
    tensors.set(`conv${i}.bias`, { shape: [outC], data: constant(outC, 0.01) });
  }
  writeSafetensors(path, tensors);
}

function main(): void {
  mkdirSync(FIXTURE_DIR, { recursive: true });
  const checkpoint = join(FIXTURE_DIR, "tiny.safetensors");
  buildTinyCheckpoint(checkpoint);
  const spec = exportCheckpoint(checkpoint, join(FIXTURE_DIR, "tiny.lgw"), {
    modelName: "tiny-synthetic",
  });
  emitFixture(checkpoint, 2024, join(FIXTURE_DIR, "tiny.lgwfix"));
  const dims = spec.layers.map((l) => l.out_channels).join("->");
  process.stdout.write(`fixtures written to ${FIXTURE_DIR} (${dims})\n`);
}

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  main();
}
