import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { RawTensor, writeSafetensors } from "../src/safetensors.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const EXPORT_BIN = join(HERE, "..", "dist", "cli-export.js");
const FIXTURE_BIN = join(HERE, "..", "dist", "cli-fixture.js");

const dir = mkdtempSync(join(tmpdir(), "lgw-cli-"));
afterAll(() => rmSync(dir, { recursive: true, force: true }));

interface RunResult {
  status: number;
  stdout: string;
  stderr: string;
}

function run(bin: string, args: string[]): RunResult {
  try {
    const stdout = execFileSync("node", [bin, ...args], { encoding: "utf-8", stdio: "pipe" });
    return { status: 0, stdout, stderr: "" };
  } catch (e) {
    const err = e as { status: number; stdout: string; stderr: string };
    return { status: err.status, stdout: String(err.stdout), stderr: String(err.stderr) };
  }
}

let ckpt: string;

beforeAll(() => {
  const t = new Map<string, RawTensor>([
    ["dense.weight", { shape: [4, 3], data: Float32Array.from({ length: 12 }, (_, i) => 0.1 * i) }],
    ["dense.bias", { shape: [4], data: new Float32Array(4) }],
    ["conv0.weight", { shape: [2, 1, 3], data: Float32Array.from({ length: 6 }, (_, i) => 0.2 - 0.05 * i) }],
    ["conv0.bias", { shape: [1], data: new Float32Array(1) }],
  ]);
  ckpt = join(dir, "cli.safetensors");
  writeSafetensors(ckpt, t);
});

describe("lgw-export CLI", () => {
  it("is built (run npm run build first if this fails)", () => {
    expect(existsSync(EXPORT_BIN)).toBe(true);
    expect(existsSync(FIXTURE_BIN)).toBe(true);
  });

  it("converts and reports the layer chain", () => {
    const out = join(dir, "cli.lgw");
    const r = run(EXPORT_BIN, [ckpt, out, "--stride", "2"]);
    expect(r.status).toBe(0);
    expect(r.stdout).toContain("wrote");
    expect(r.stdout).toContain("1 layers");
    expect(existsSync(out)).toBe(true);
  });

  it("prints usage on --help", () => {
    const r = run(EXPORT_BIN, ["--help"]);
    expect(r.status).toBe(0);
    expect(r.stdout).toContain("usage: lgw-export");
  });

  it("exits 2 with usage when positionals are missing", () => {
    const r = run(EXPORT_BIN, [ckpt]);
    expect(r.status).toBe(2);
    expect(r.stderr).toContain("usage: lgw-export");
  });

  it("exits 2 on an unknown option", () => {
    const r = run(EXPORT_BIN, [ckpt, join(dir, "x.lgw"), "--frobnicate"]);
    expect(r.status).toBe(2);
    expect(r.stderr).toContain("unknown option");
  });

  it("exits 2 on a missing checkpoint file", () => {
    const r = run(EXPORT_BIN, [join(dir, "nope.safetensors"), join(dir, "nope.lgw")]);
    expect(r.status).toBe(2);
    expect(r.stderr).toContain("no such file");
  });
});

describe("lgw-fixture CLI", () => {
  it("requires --seed", () => {
    const r = run(FIXTURE_BIN, [ckpt, join(dir, "x.lgwfix")]);
    expect(r.status).toBe(2);
    expect(r.stderr).toContain("--seed is required");
  });

  it("rejects a non-integer seed", () => {
    const r = run(FIXTURE_BIN, [ckpt, join(dir, "x.lgwfix"), "--seed", "banana"]);
    expect(r.status).toBe(2);
  });

  it("emits a fixture", () => {
    const out = join(dir, "cli.lgwfix");
    const r = run(FIXTURE_BIN, [ckpt, out, "--seed", "5", "--stride", "2"]);
    expect(r.status).toBe(0);
    expect(r.stdout).toContain("seed 5");
    expect(existsSync(out)).toBe(true);
  });
});
