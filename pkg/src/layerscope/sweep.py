"""Latent sweeps: move one input variable through marginal values.

A sweep holds every other latent entry bitwise fixed and steps the
target through ``start + k * step`` (computed by index multiplication,
never cumulative addition), tracing the full forward pass at each step.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .generator import ForwardTrace, LatentVector, WeightBundle, forward
from .parallel import ordered_map
from .probe import LayerProbe, probes_from_trace
from .validation import check_index

_TARGET_RE = re.compile(r"^([zc])(\d+)$")


@dataclass(frozen=True)
class SweepTarget:
    """Which input entry to sweep: kind 'z' or 'code', 0-based index."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("z", "code"):
            raise ValidationError(f"target kind must be 'z' or 'code', got {self.kind!r}")
        if not isinstance(self.index, int) or self.index < 0:
            raise ValidationError(f"target index must be a non-negative integer, got {self.index!r}")

    @classmethod
    def parse(cls, label: str) -> "SweepTarget":
        """Parse CLI-style labels: ``z11`` is z[11], ``c1`` is code[1]."""
        m = _TARGET_RE.match(label.strip())
        if not m:
            raise ValidationError(f"cannot parse sweep target {label!r} (expected e.g. z11 or c0)")
        kind = "z" if m.group(1) == "z" else "code"
        return cls(kind=kind, index=int(m.group(2)))

    @property
    def label(self) -> str:
        return ("z" if self.kind == "z" else "c") + str(self.index)


def sweep_values(start: float, end: float, step: float) -> np.ndarray:
    """The progression start + k * step covering [start, end] exactly."""
    for name, v in (("start", start), ("end", end), ("step", step)):
        if not np.isfinite(v):
            raise ValidationError(f"sweep {name} must be finite")
    if end < start:
        raise ValidationError(f"sweep needs end >= start, got [{start}, {end}]")
    if start == end:
        return np.array([float(start)])
    if step <= 0:
        raise ValidationError(f"sweep step must be positive, got {step}")
    q = (end - start) / step
    count = round(q)
    if count < 1 or abs(q - count) > 4.0 * np.spacing(max(1.0, abs(q))):
        raise ValidationError(
            f"span {end - start} is not an integer multiple of step {step}"
        )
    return start + step * np.arange(count + 1, dtype=np.float64)


@dataclass(frozen=True)
class SweepSpec:
    target: SweepTarget
    start: float
    end: float
    step: float
    base_latent: LatentVector

    def __post_init__(self):
        self.values()  # validates the progression

    def values(self) -> np.ndarray:
        return sweep_values(self.start, self.end, self.step)


@dataclass(frozen=True)
class SweepStep:
    value: float
    latent: LatentVector
    trace: ForwardTrace = field(repr=False)
    probes: tuple[LayerProbe, ...] = field(repr=False)

    @property
    def waveform(self) -> np.ndarray:
        return self.trace.waveform


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    steps: tuple[SweepStep, ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.steps])

    def layer_tensors(self, layer_index: int):
        """Post-activation tensors of one layer across all steps."""
        return [s.trace.layer(layer_index).post for s in self.steps]


def _latent_with(base: LatentVector, target: SweepTarget, value: float) -> LatentVector:
    if target.kind == "z":
        check_index(target.index, base.z.shape[0], "sweep z index")
        z = base.z.copy()
        z[target.index] = value
        code = None if base.code is None else base.code.copy()
        return LatentVector(z=z, code=code)
    if base.code is None:
        raise ValidationError("sweep targets a code entry but the base latent has no code")
    check_index(target.index, base.code.shape[0], "sweep code index")
    code = base.code.copy()
    code[target.index] = value
    return LatentVector(z=base.z.copy(), code=code)


def run_sweep(spec: SweepSpec, bundle: WeightBundle, threads: int | None = None) -> SweepResult:
    """Trace the generator at every sweep value; parallel across steps."""
    if spec.target.kind == "z":
        check_index(spec.target.index, bundle.spec.latent_dim, "sweep z index")
    else:
        if bundle.spec.code_dim == 0:
            raise ValidationError("sweep targets a code entry but the spec has code_dim=0")
        check_index(spec.target.index, bundle.spec.code_dim, "sweep code index")
    values = spec.values()

    def one(value: float) -> SweepStep:
        latent = _latent_with(spec.base_latent, spec.target, float(value))
        trace = forward(bundle, latent)
        return SweepStep(
            value=float(value),
            latent=latent,
            trace=trace,
            probes=tuple(probes_from_trace(trace)),
        )

    steps = ordered_map(one, values, threads=threads)
    return SweepResult(spec=spec, steps=tuple(steps))


def sweep_energy_profile(result: SweepResult, layer_index: int,
                         window: tuple[int, int] | None = None) -> np.ndarray:
    """Per-step mean of one layer's probe over a sample window [a, b)."""
    if not result.steps:
        raise ValidationError("sweep result has no steps")
    check_index(layer_index, len(result.steps[0].probes), "layer_index")
    n = result.steps[0].probes[layer_index].series.shape[0]
    if window is None:
        a, b = 0, n
    else:
        a, b = window
        if not (isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer))):
            raise ValidationError(f"window bounds must be integers, got {window!r}")
        if not (0 <= a < b <= n):
            raise ValidationError(f"window [{a}, {b}) out of bounds for {n} samples")
    out = np.empty(len(result.steps))
    for i, step in enumerate(result.steps):
        out[i] = float(np.mean(step.probes[layer_index].series[a:b]))
    return out
