"""Tensor containers and the numerical kernels behind the generator.

All arrays are float64 internally; 32-bit storage only exists at the
file-format boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, ValidationError
from .validation import as_float_vector, check_finite


@dataclass(frozen=True)
class TensorTS:
    """A bank of equal-length time series: ``data`` has shape (channels, samples)."""

    data: np.ndarray = field(repr=False)
    channels: int = 0
    samples: int = 0

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"TensorTS data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"TensorTS must be non-empty, got shape {arr.shape}")
        check_finite(arr, "TensorTS data")
        object.__setattr__(self, "data", np.ascontiguousarray(arr))
        object.__setattr__(self, "channels", arr.shape[0])
        object.__setattr__(self, "samples", arr.shape[1])

    @classmethod
    def from_array(cls, data) -> "TensorTS":
        return cls(data=np.asarray(data, dtype=np.float64))


def relu(x: np.ndarray) -> np.ndarray:
    """max(x, 0), elementwise."""
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def tanh_act(x: np.ndarray) -> np.ndarray:
    """tanh(x), elementwise; range is the open interval (-1, 1)."""
    return np.tanh(np.asarray(x, dtype=np.float64))


def dense(input_vec, weights, bias) -> np.ndarray:
    """Affine map ``weights @ input + bias`` with weights shaped (out, in)."""
    x = as_float_vector(input_vec, "dense input")
    w = np.asarray(weights, dtype=np.float64)
    b = as_float_vector(bias, "dense bias")
    if w.ndim != 2:
        raise DimensionError(f"dense weights must be 2-D, got shape {w.shape}")
    check_finite(w, "dense weights")
    if w.shape[1] != x.shape[0]:
        raise DimensionError(
            f"dense weights expect input width {w.shape[1]}, got {x.shape[0]}"
        )
    if w.shape[0] != b.shape[0]:
        raise DimensionError(
            f"dense bias width {b.shape[0]} does not match output width {w.shape[0]}"
        )
    return w @ x + b


def transpose_conv_pad(kernel: int, stride: int) -> int:
    """Left crop of the transposed convolution: floor((kernel - stride) / 2)."""
    return (kernel - stride) // 2


def transpose_conv1d(input_ts: TensorTS, weights, bias, stride: int) -> TensorTS:
    """1-D transposed convolution with length-preserving SAME semantics.

    ``weights`` has shape (in_channels, out_channels, kernel); output length
    is exactly ``stride * input.samples``. Output sample t collects every
    (input sample u, tap k) with ``u * stride + k - pad_left == t`` where
    ``pad_left = floor((kernel - stride) / 2)``, so the crop removes one
    more sample on the right than on the left when kernel - stride is odd.
    """
    if not isinstance(input_ts, TensorTS):
        input_ts = TensorTS.from_array(input_ts)
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 3:
        raise DimensionError(f"weights must be 3-D (in, out, kernel), got shape {w.shape}")
    check_finite(w, "transpose conv weights")
    c_in, c_out, kernel = w.shape
    if c_in != input_ts.channels:
        raise DimensionError(
            f"weights expect {c_in} input channels, tensor has {input_ts.channels}"
        )
    if stride < 1:
        raise ValidationError(f"stride must be >= 1, got {stride}")
    if kernel < stride:
        raise ValidationError(f"kernel ({kernel}) must be >= stride ({stride})")
    b = as_float_vector(bias, "transpose conv bias")
    if b.shape[0] != c_out:
        raise DimensionError(f"bias width {b.shape[0]} does not match out channels {c_out}")

    length = input_ts.samples
    out_len = stride * length
    pad_left = transpose_conv_pad(kernel, stride)

    # One GEMM per layer, then K strided scatter-adds.
    mixed = (w.reshape(c_in, c_out * kernel).T @ input_ts.data).reshape(c_out, kernel, length)
    out = np.repeat(b[:, None], out_len, axis=1)
    for k in range(kernel):
        t0 = k - pad_left
        u_lo = max(0, (-t0 + stride - 1) // stride) if t0 < 0 else 0
        u_hi = min(length, (out_len - 1 - t0) // stride + 1) if t0 < out_len else 0
        if u_lo >= u_hi:
            continue
        start = t0 + stride * u_lo
        stop = t0 + stride * (u_hi - 1) + 1
        out[:, start:stop:stride] += mixed[:, k, u_lo:u_hi]
    return TensorTS(data=out)


def linear_resample(series, target_len: int) -> np.ndarray:
    """Linear interpolation onto ``target_len`` points spanning the series.

    Output j samples position j * (n - 1) / (target_len - 1); both endpoints
    are preserved exactly and a linear ramp stays linear.
    """
    x = as_float_vector(series, "series", min_len=2)
    if not isinstance(target_len, (int, np.integer)) or target_len < 1:
        raise ValidationError(f"target_len must be a positive integer, got {target_len!r}")
    if target_len == 1:
        return np.array([x[0]])
    n = x.shape[0]
    positions = np.linspace(0.0, n - 1.0, int(target_len))
    return np.interp(positions, np.arange(n, dtype=np.float64), x)
