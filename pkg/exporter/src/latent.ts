/** Seeded latent draws. splitmix64 under the hood; one stream per seed. */

const MASK = (1n << 64n) - 1n;

export function* splitmix64(seed: number | bigint): Generator<bigint> {
  let state = BigInt(seed) & MASK;
  for (;;) {
    state = (state + 0x9e3779b97f4a7c15n) & MASK;
    let z = state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
    yield (z ^ (z >> 31n)) & MASK;
  }
}

/** Uniform draws in [-1, 1), the generator's training interval. */
export function latentFromSeed(seed: number, width: number): Float32Array {
  if (!Number.isInteger(seed) || seed < 0) {
    throw new Error(`seed must be a nonnegative integer, got ${seed}`);
  }
  if (!Number.isInteger(width) || width <= 0) {
    throw new Error(`latent width must be positive, got ${width}`);
  }
  const out = new Float32Array(width);
  const stream = splitmix64(seed);
  for (let i = 0; i < width; i++) {
    const u = Number(stream.next().value >> 11n) / 2 ** 53;
    out[i] = 2 * u - 1;
  }
  return out;
}
