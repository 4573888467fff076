#!/usr/bin/env node
import { parseArgs, runMain } from "./cli-common.js";
import { ExportError } from "./container.js";
import { exportCheckpoint } from "./export.js";
import { outputSamples } from "./spec.js";

const USAGE = `usage: lgw-export <checkpoint> <out.lgw> [options]

Convert a generator checkpoint (.safetensors or tfjs model.json) into a
.lgw weight file.

options:
  --stride N          upsampling factor per layer (default 4)
  --code-dim N        leading categorical code entries (default 0)
  --model-name NAME   stored model name (default: checkpoint basename)
  --trained-steps N   stored training step count (default 0)
  --framework F       torch | tf (default: detected from tensor names)`;

runMain(() => {
  const { positional, options } = parseArgs(process.argv.slice(2), USAGE);
  if (positional.length !== 2) {
    throw new ExportError(`expected <checkpoint> and <out.lgw>\n${USAGE}`, "usage");
  }
  const [checkpoint, out] = positional;
  const spec = exportCheckpoint(checkpoint, out, options);
  const chain = spec.layers.map((l) => l.out_channels).join("->");
  process.stdout.write(
    `wrote ${out}: ${spec.layers.length} layers (${chain}), ${outputSamples(spec)} output samples\n`,
  );
});
