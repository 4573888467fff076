"""Generator architecture, weights, and the traced forward pass.

The canonical network maps a latent vector through one dense stage
(reshaped to 1024 channels x 16 samples, ReLU) and a chain of transposed
convolutions, ReLU between layers and tanh on the last, so every
intermediate layer is a bank of nonnegative time series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import DimensionError, ValidationError
from .rng import Rng
from .tensorops import TensorTS, dense, relu, tanh_act, transpose_conv1d
from .validation import as_float_vector, check_index, check_positive_int

ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class LayerSpec:
    in_channels: int
    out_channels: int
    kernel: int = 25
    stride: int = 4
    activation: str = "relu"

    def __post_init__(self):
        check_positive_int(self.in_channels, "in_channels")
        check_positive_int(self.out_channels, "out_channels")
        check_positive_int(self.kernel, "kernel")
        check_positive_int(self.stride, "stride")
        if self.kernel < self.stride:
            raise ValidationError(
                f"kernel ({self.kernel}) must be >= stride ({self.stride})"
            )
        if self.activation not in ACTIVATIONS:
            raise ValidationError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class GeneratorSpec:
    """Architecture description; all tensor shapes derive from it."""

    latent_dim: int
    code_dim: int
    dense_channels: int
    dense_samples: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        check_positive_int(self.latent_dim, "latent_dim")
        if not isinstance(self.code_dim, (int, np.integer)) or self.code_dim < 0:
            raise ValidationError(f"code_dim must be a non-negative integer, got {self.code_dim!r}")
        check_positive_int(self.dense_channels, "dense_channels")
        check_positive_int(self.dense_samples, "dense_samples")
        layers = tuple(self.layers)
        if not layers:
            raise ValidationError("spec needs at least one layer")
        object.__setattr__(self, "layers", layers)
        prev = self.dense_channels
        for i, layer in enumerate(layers):
            if layer.in_channels != prev:
                raise ValidationError(
                    f"layer {i} expects {layer.in_channels} input channels, previous stage emits {prev}"
                )
            prev = layer.out_channels
        if layers[-1].activation != "tanh":
            raise ValidationError("last layer must use tanh")
        if layers[-1].out_channels != 1:
            raise ValidationError("last layer must emit a single channel")
        for layer in layers[:-1]:
            if layer.activation != "relu":
                raise ValidationError("intermediate layers must use relu")

    @property
    def input_width(self) -> int:
        return self.code_dim + self.latent_dim

    def layer_samples(self, layer_index: int) -> int:
        """Sample count after layer ``layer_index`` (0-based)."""
        check_index(layer_index, len(self.layers), "layer_index")
        n = self.dense_samples
        for layer in self.layers[: layer_index + 1]:
            n *= layer.stride
        return n

    @property
    def output_samples(self) -> int:
        return self.layer_samples(len(self.layers) - 1)

    def to_dict(self) -> dict:
        return {
            "latent_dim": self.latent_dim,
            "code_dim": self.code_dim,
            "dense_out": {"channels": self.dense_channels, "samples": self.dense_samples},
            "layers": [
                {
                    "in_channels": l.in_channels,
                    "out_channels": l.out_channels,
                    "kernel": l.kernel,
                    "stride": l.stride,
                    "activation": l.activation,
                }
                for l in self.layers
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        try:
            layers = tuple(
                LayerSpec(
                    in_channels=int(l["in_channels"]),
                    out_channels=int(l["out_channels"]),
                    kernel=int(l["kernel"]),
                    stride=int(l["stride"]),
                    activation=str(l["activation"]),
                )
                for l in d["layers"]
            )
            return cls(
                latent_dim=int(d["latent_dim"]),
                code_dim=int(d["code_dim"]),
                dense_channels=int(d["dense_out"]["channels"]),
                dense_samples=int(d["dense_out"]["samples"]),
                layers=layers,
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed spec dictionary: {exc}") from exc


def wavegan_spec() -> GeneratorSpec:
    """5-layer generator: 100 latents, 16384 output samples at 16 kHz."""
    return GeneratorSpec(
        latent_dim=100,
        code_dim=0,
        dense_channels=1024,
        dense_samples=16,
        layers=(
            LayerSpec(1024, 512),
            LayerSpec(512, 256),
            LayerSpec(256, 128),
            LayerSpec(128, 64),
            LayerSpec(64, 1, activation="tanh"),
        ),
    )


def ciwgan_spec(code_dim: int = 2) -> GeneratorSpec:
    """Coded variant: ``code_dim`` code entries prepended, total width 100."""
    check_positive_int(code_dim, "code_dim")
    if code_dim >= 100:
        raise ValidationError("code_dim must leave room for latent variables")
    base = wavegan_spec()
    return GeneratorSpec(
        latent_dim=100 - code_dim,
        code_dim=code_dim,
        dense_channels=base.dense_channels,
        dense_samples=base.dense_samples,
        layers=base.layers,
    )


def deep_spec() -> GeneratorSpec:
    """10-layer variant: stride 2 per layer, channels halving from 1024."""
    channels = [1024, 512, 256, 128, 64, 32, 16, 8, 4, 2, 1]
    layers = tuple(
        LayerSpec(channels[i], channels[i + 1], kernel=25, stride=2,
                  activation="tanh" if i == 9 else "relu")
        for i in range(10)
    )
    return GeneratorSpec(
        latent_dim=100, code_dim=0, dense_channels=1024, dense_samples=16, layers=layers
    )


@dataclass(frozen=True)
class WeightBundle:
    """Weights for one GeneratorSpec plus provenance metadata."""

    spec: GeneratorSpec
    dense_weight: np.ndarray = field(repr=False)
    dense_bias: np.ndarray = field(repr=False)
    conv_weights: tuple = field(repr=False)
    conv_biases: tuple = field(repr=False)
    model_name: str = "untitled"
    trained_steps: int = 0

    def __post_init__(self):
        spec = self.spec
        w = np.ascontiguousarray(np.asarray(self.dense_weight, dtype=np.float64))
        b = np.ascontiguousarray(np.asarray(self.dense_bias, dtype=np.float64))
        dense_out = spec.dense_channels * spec.dense_samples
        if w.shape != (dense_out, spec.input_width):
            raise DimensionError(
                f"dense weight shape {w.shape} does not match spec "
                f"({dense_out}, {spec.input_width})"
            )
        if b.shape != (dense_out,):
            raise DimensionError(f"dense bias shape {b.shape} does not match spec ({dense_out},)")
        convs = []
        biases = []
        if len(self.conv_weights) != len(spec.layers) or len(self.conv_biases) != len(spec.layers):
            raise DimensionError(
                f"expected {len(spec.layers)} conv weight/bias pairs, "
                f"got {len(self.conv_weights)}/{len(self.conv_biases)}"
            )
        for i, layer in enumerate(spec.layers):
            cw = np.ascontiguousarray(np.asarray(self.conv_weights[i], dtype=np.float64))
            cb = np.ascontiguousarray(np.asarray(self.conv_biases[i], dtype=np.float64))
            want = (layer.in_channels, layer.out_channels, layer.kernel)
            if cw.shape != want:
                raise DimensionError(f"conv {i} weight shape {cw.shape} does not match spec {want}")
            if cb.shape != (layer.out_channels,):
                raise DimensionError(
                    f"conv {i} bias shape {cb.shape} does not match spec ({layer.out_channels},)"
                )
            convs.append(cw)
            biases.append(cb)
        for name, arr in self.named_tensors():
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"tensor {name} contains non-finite values")
        object.__setattr__(self, "dense_weight", w)
        object.__setattr__(self, "dense_bias", b)
        object.__setattr__(self, "conv_weights", tuple(convs))
        object.__setattr__(self, "conv_biases", tuple(biases))

    def named_tensors(self):
        """Tensors in canonical file order: dense pair, then per-layer pairs."""
        yield "dense/weight", self.dense_weight
        yield "dense/bias", self.dense_bias
        for i in range(len(self.spec.layers)):
            yield f"conv{i}/kernel", self.conv_weights[i]
            yield f"conv{i}/bias", self.conv_biases[i]


def random_bundle(spec: GeneratorSpec, seed: int = 0, scale: float = 0.05,
                  model_name: str = "random") -> WeightBundle:
    """Uniform random weights in [-scale, scale); handy for tests and demos."""
    rng = np.random.default_rng(np.uint64(seed))

    def draw(shape):
        return rng.uniform(-scale, scale, size=shape)

    dense_out = spec.dense_channels * spec.dense_samples
    return WeightBundle(
        spec=spec,
        dense_weight=draw((dense_out, spec.input_width)),
        dense_bias=draw((dense_out,)),
        conv_weights=tuple(
            draw((l.in_channels, l.out_channels, l.kernel)) for l in spec.layers
        ),
        conv_biases=tuple(draw((l.out_channels,)) for l in spec.layers),
        model_name=model_name,
    )


def zero_bundle(spec: GeneratorSpec, model_name: str = "zero") -> WeightBundle:
    """All-zero weights; the forward pass emits exactly zero everywhere."""
    dense_out = spec.dense_channels * spec.dense_samples
    return WeightBundle(
        spec=spec,
        dense_weight=np.zeros((dense_out, spec.input_width)),
        dense_bias=np.zeros(dense_out),
        conv_weights=tuple(
            np.zeros((l.in_channels, l.out_channels, l.kernel)) for l in spec.layers
        ),
        conv_biases=tuple(np.zeros(l.out_channels) for l in spec.layers),
        model_name=model_name,
    )


@dataclass(frozen=True)
class LatentVector:
    """Generator input: optional code entries followed by the z variables."""

    z: np.ndarray
    code: np.ndarray | None = None

    def __post_init__(self):
        z = as_float_vector(self.z, "z", min_len=1)
        object.__setattr__(self, "z", z)
        if self.code is not None:
            code = as_float_vector(self.code, "code")
            object.__setattr__(self, "code", code)

    def full(self) -> np.ndarray:
        if self.code is None or self.code.shape[0] == 0:
            return self.z.copy()
        return np.concatenate([self.code, self.z])


def sample_latent(rng: Rng, spec: GeneratorSpec, overrides: dict | None = None,
                  code=None) -> LatentVector:
    """Draw z uniformly from [-1, 1), then pin ``overrides`` entries exactly.

    ``overrides`` maps z indices to values; the full z vector is drawn
    first so overriding never changes the draws of other entries.
    """
    z = np.array([rng.uniform(-1.0, 1.0) for _ in range(spec.latent_dim)])
    if overrides:
        for index, value in overrides.items():
            check_index(index, spec.latent_dim, "override index")
            value = float(value)
            if not np.isfinite(value):
                raise ValidationError(f"override for z[{index}] is not finite")
            z[index] = value
    if spec.code_dim == 0:
        if code is not None and len(np.atleast_1d(code)) > 0:
            raise ValidationError("spec has no code entries, but a code was supplied")
        return LatentVector(z=z)
    if code is None:
        code_vec = np.zeros(spec.code_dim)
    else:
        code_vec = as_float_vector(code, "code")
        if code_vec.shape[0] != spec.code_dim:
            raise DimensionError(
                f"code width {code_vec.shape[0]} does not match spec code_dim {spec.code_dim}"
            )
    return LatentVector(z=z, code=code_vec)


@dataclass(frozen=True)
class TraceEntry:
    name: str
    pre: TensorTS
    post: TensorTS


@dataclass(frozen=True)
class ForwardTrace:
    """Dense stage plus one entry per conv layer, then the output waveform."""

    entries: tuple[TraceEntry, ...]
    waveform: np.ndarray

    @property
    def dense(self) -> TraceEntry:
        return self.entries[0]

    def layer(self, layer_index: int) -> TraceEntry:
        """Conv layer entry by 0-based layer index."""
        check_index(layer_index, len(self.entries) - 1, "layer_index")
        return self.entries[layer_index + 1]

    @property
    def n_layers(self) -> int:
        return len(self.entries) - 1


def forward(bundle: WeightBundle, latent: LatentVector) -> ForwardTrace:
    """Run the generator, recording pre/post activation at every stage."""
    spec = bundle.spec
    x = latent.full()
    if x.shape[0] != spec.input_width:
        raise DimensionError(
            f"latent width {x.shape[0]} does not match spec input width {spec.input_width}"
        )
    if spec.code_dim > 0:
        if latent.code is None or latent.code.shape[0] != spec.code_dim:
            raise DimensionError(f"spec expects a code of width {spec.code_dim}")

    flat = dense(x, bundle.dense_weight, bundle.dense_bias)
    pre = TensorTS(data=flat.reshape(spec.dense_channels, spec.dense_samples))
    post = TensorTS(data=relu(pre.data))
    entries = [TraceEntry(name="dense", pre=pre, post=post)]

    current = post
    for i, layer in enumerate(spec.layers):
        pre = transpose_conv1d(current, bundle.conv_weights[i], bundle.conv_biases[i],
                               stride=layer.stride)
        act = relu(pre.data) if layer.activation == "relu" else tanh_act(pre.data)
        post = TensorTS(data=act)
        entries.append(TraceEntry(name=f"conv{i}", pre=pre, post=post))
        current = post

    waveform = current.data[0].copy()
    return ForwardTrace(entries=tuple(entries), waveform=waveform)


class WaveGenerator(BaseEstimator):
    """Estimator-style wrapper around a weight bundle.

    The network is trained elsewhere, so there is no ``fit``; ``predict``
    maps rows of latent inputs to waveform rows.
    """

    def __init__(self, bundle: WeightBundle | None = None):
        self.bundle = bundle

    def _require_bundle(self) -> WeightBundle:
        if self.bundle is None:
            raise ValidationError("WaveGenerator has no weight bundle")
        return self.bundle

    @property
    def spec(self) -> GeneratorSpec:
        return self._require_bundle().spec

    def trace(self, latent: LatentVector) -> ForwardTrace:
        return forward(self._require_bundle(), latent)

    def predict(self, latents) -> np.ndarray:
        """Rows of full input vectors (code entries first) to waveform rows."""
        bundle = self._require_bundle()
        arr = np.asarray(latents, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != bundle.spec.input_width:
            raise DimensionError(
                f"latents must be (n, {bundle.spec.input_width}), got {arr.shape}"
            )
        out = np.empty((arr.shape[0], bundle.spec.output_samples))
        for i, row in enumerate(arr):
            code = row[: bundle.spec.code_dim] if bundle.spec.code_dim else None
            latent = LatentVector(z=row[bundle.spec.code_dim:], code=code)
            out[i] = forward(bundle, latent).waveform
        return out
