#!/usr/bin/env node
import { parseArgs, runMain } from "./cli-common.js";
import { ExportError } from "./container.js";
import { emitFixture } from "./export.js";

const USAGE = `usage: lgw-fixture <checkpoint> --seed N <out.lgwfix> [options]

Run the framework-side forward pass of a checkpoint on a seeded latent
and store every intermediate tensor as a golden fixture.

options:
  --seed N            latent seed (required)
  --stride N          upsampling factor per layer (default 4)
  --code-dim N        leading categorical code entries (default 0)
  --framework F       torch | tf (default: detected from tensor names)`;

runMain(() => {
  const { positional, options, seed } = parseArgs(process.argv.slice(2), USAGE);
  if (positional.length !== 2) {
    throw new ExportError(`expected <checkpoint> and <out.lgwfix>\n${USAGE}`, "usage");
  }
  if (seed === undefined) {
    throw new ExportError(`--seed is required\n${USAGE}`, "usage");
  }
  const [checkpoint, out] = positional;
  const spec = emitFixture(checkpoint, seed, out, options);
  process.stdout.write(`wrote ${out}: seed ${seed}, ${spec.layers.length} layers captured\n`);
});
