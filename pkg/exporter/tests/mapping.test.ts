import { describe, expect, it } from "vitest";

import { ExportError } from "../src/container.js";
import { detectFramework, mapToLgw } from "../src/mapping.js";
import { RawTensor } from "../src/safetensors.js";

function torchCheckpoint(): Map<string, RawTensor> {
  // latent 3, dense 2ch x 2s, one conv 2 -> 1, kernel 4
  return new Map<string, RawTensor>([
    ["dense.weight", { shape: [4, 3], data: Float32Array.from({ length: 12 }, (_, i) => i) }],
    ["dense.bias", { shape: [4], data: Float32Array.from([1, 2, 3, 4]) }],
    ["conv0.weight", { shape: [2, 1, 4], data: Float32Array.from({ length: 8 }, (_, i) => 10 + i) }],
    ["conv0.bias", { shape: [1], data: Float32Array.from([0.5]) }],
  ]);
}

describe("framework detection", () => {
  it("spots torch-style names", () => {
    expect(detectFramework(["dense.weight", "conv0.bias"])).toBe("torch");
  });

  it("spots tf-style names", () => {
    expect(detectFramework(["dense/kernel", "conv0/bias"])).toBe("tf");
  });

  it("gives up on unknown conventions", () => {
    expect(() => detectFramework(["weird_blob"])).toThrow(ExportError);
  });
});

describe("torch mapping", () => {
  it("renames without touching axes", () => {
    const mapped = mapToLgw(torchCheckpoint());
    const names = mapped.map((t) => t.name);
    expect(names).toEqual(["dense/weight", "dense/bias", "conv0/kernel", "conv0/bias"]);
    const kernel = mapped.find((t) => t.name === "conv0/kernel")!;
    expect(kernel.shape).toEqual([2, 1, 4]);
    expect(Array.from(kernel.data)).toEqual([10, 11, 12, 13, 14, 15, 16, 17]);
  });

  it("accepts a generator. prefix", () => {
    const prefixed = new Map(
      Array.from(torchCheckpoint(), ([k, v]) => [`generator.${k}`, v] as const),
    );
    const mapped = mapToLgw(prefixed, { framework: "torch" });
    expect(mapped.map((t) => t.name)).toContain("conv0/kernel");
  });

  it("reports the missing bias by name", () => {
    const broken = torchCheckpoint();
    broken.delete("conv0.bias");
    try {
      mapToLgw(broken);
      expect.unreachable("should have thrown");
    } catch (e) {
      expect((e as ExportError).code).toBe("missing_tensor");
      expect((e as ExportError).message).toContain("conv0.bias");
    }
  });
});

describe("tf mapping", () => {
  const C = 2, S = 3, L = 4; // channels, samples, latent

  function tfFromLgwDense(lgw: Float32Array): Float32Array {
    // invert the documented reorder: tf kernel is (latent, denseOut sample-major)
    const kernel = new Float32Array(L * C * S);
    for (let c = 0; c < C; c++) {
      for (let s = 0; s < S; s++) {
        for (let l = 0; l < L; l++) {
          kernel[l * (C * S) + (s * C + c)] = lgw[(c * S + s) * L + l];
        }
      }
    }
    return kernel;
  }

  it("recovers a channel-major dense weight from the tf layout", () => {
    const target = Float32Array.from({ length: C * S * L }, (_, i) => i * 0.25 - 2);
    const targetBias = Float32Array.from({ length: C * S }, (_, i) => i);
    const tfBias = new Float32Array(C * S);
    for (let c = 0; c < C; c++) {
      for (let s = 0; s < S; s++) tfBias[s * C + c] = targetBias[c * S + s];
    }
    const ckpt = new Map<string, RawTensor>([
      ["dense/kernel", { shape: [L, C * S], data: tfFromLgwDense(target) }],
      ["dense/bias", { shape: [C * S], data: tfBias }],
      // one conv so the mapper can see C; delta-ish values, shape [K, 1, out, in]
      ["conv0/kernel", { shape: [5, 1, 1, C], data: new Float32Array(5 * C) }],
      ["conv0/bias", { shape: [1], data: new Float32Array(1) }],
    ]);
    const mapped = mapToLgw(ckpt);
    const dense = mapped.find((t) => t.name === "dense/weight")!;
    expect(dense.shape).toEqual([C * S, L]);
    expect(Array.from(dense.data)).toEqual(Array.from(target));
    const bias = mapped.find((t) => t.name === "dense/bias")!;
    expect(Array.from(bias.data)).toEqual(Array.from(targetBias));
  });

  it("permutes 4-D kernels [K,1,out,in] to (in,out,K)", () => {
    const K = 3, O = 2, I = 2;
    const tfk = new Float32Array(K * O * I);
    const want = new Float32Array(I * O * K);
    let v = 1;
    for (let ki = 0; ki < K; ki++) {
      for (let o = 0; o < O; o++) {
        for (let i = 0; i < I; i++) {
          tfk[(ki * O + o) * I + i] = v;
          want[(i * O + o) * K + ki] = v;
          v += 1;
        }
      }
    }
    const ckpt = new Map<string, RawTensor>([
      ["dense/kernel", { shape: [3, I * 2], data: new Float32Array(3 * I * 2) }],
      ["dense/bias", { shape: [I * 2], data: new Float32Array(I * 2) }],
      ["conv0/kernel", { shape: [K, 1, O, I], data: tfk }],
      ["conv0/bias", { shape: [O], data: new Float32Array(O) }],
    ]);
    const mapped = mapToLgw(ckpt);
    const kernel = mapped.find((t) => t.name === "conv0/kernel")!;
    expect(kernel.shape).toEqual([I, O, K]);
    expect(Array.from(kernel.data)).toEqual(Array.from(want));
  });

  it("accepts 3-D kernels [K,out,in] too", () => {
    const ckpt = new Map<string, RawTensor>([
      ["dense/kernel", { shape: [2, 4], data: new Float32Array(8) }],
      ["dense/bias", { shape: [4], data: new Float32Array(4) }],
      ["conv0/kernel", { shape: [5, 1, 2], data: new Float32Array(10) }],
      ["conv0/bias", { shape: [1], data: new Float32Array(1) }],
    ]);
    const mapped = mapToLgw(ckpt);
    expect(mapped.find((t) => t.name === "conv0/kernel")!.shape).toEqual([2, 1, 5]);
  });
});
