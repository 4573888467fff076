"""Layer probes: each intermediate layer averaged into a single time series.

Averaging the post-activation feature maps channelwise turns a layer into
one nonnegative series short enough to inspect, plot, or (after
upsampling) listen to. A layer that is ``n`` samples long resolves
content only up to ``n / 2`` Hz, which is what makes the late layers
sound like muffled previews of the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .generator import ForwardTrace, GeneratorSpec
from .tensorops import TensorTS, linear_resample
from .validation import check_index

OUTPUT_SAMPLES = 16384
OUTPUT_RATE = 16000


@dataclass(frozen=True)
class LayerProbe:
    """Channel-mean series for one layer.

    ``scale_hint`` is a display-only factor: multiplying the series by it
    matches the probe's peak to the output waveform's peak for overlay
    plots. It never feeds back into analysis.
    """

    layer_index: int
    series: np.ndarray = field(repr=False)
    scale_hint: float = 1.0

    def __post_init__(self):
        series = np.asarray(self.series, dtype=np.float64)
        if series.ndim != 1 or series.shape[0] == 0:
            raise ValidationError(f"probe series must be a non-empty vector, got shape {series.shape}")
        if not np.all(np.isfinite(series)):
            raise ValidationError("probe series contains non-finite values")
        if not (np.isfinite(self.scale_hint) and self.scale_hint > 0):
            raise ValidationError(f"scale_hint must be positive and finite, got {self.scale_hint}")
        object.__setattr__(self, "series", series)


def average_feature_maps(layer: TensorTS, layer_index: int = 0,
                         scale_hint: float = 1.0) -> LayerProbe:
    """Mean across channels at each time step: (1 / channels) * sum of maps."""
    if not isinstance(layer, TensorTS):
        layer = TensorTS.from_array(layer)
    series = layer.data.sum(axis=0) / layer.channels
    return LayerProbe(layer_index=layer_index, series=series, scale_hint=scale_hint)


def probes_from_trace(trace: ForwardTrace) -> list[LayerProbe]:
    """One probe per conv layer, scale hints tied to the output peak."""
    peak = float(np.max(np.abs(trace.waveform)))
    probes = []
    for i in range(trace.n_layers):
        probe = average_feature_maps(trace.layer(i).post, layer_index=i)
        top = float(np.max(probe.series))
        hint = peak / top if top > 0 and peak > 0 else 1.0
        probes.append(LayerProbe(layer_index=i, series=probe.series, scale_hint=hint))
    return probes


def probe_to_waveform(probe: LayerProbe, sample_rate: int = OUTPUT_RATE,
                      target_len: int = OUTPUT_SAMPLES) -> np.ndarray:
    """Make a probe audible: clip values above 1, then linearly upsample.

    Matches the listening pipeline used for generator outputs: amplitudes
    above 1 are clipped to 1, and the series is stretched to
    ``target_len`` samples (1.024 s at 16 kHz) by linear interpolation.
    """
    if sample_rate <= 0:
        raise ValidationError(f"sample_rate must be positive, got {sample_rate}")
    clipped = np.minimum(probe.series, 1.0)
    if clipped.shape[0] == target_len:
        return clipped.copy()
    return linear_resample(clipped, target_len)


def layer_nyquist(spec: GeneratorSpec, layer_index: int) -> float:
    """Frequency ceiling of a layer, counted as samples / 2 in Hz.

    The convention treats one layer sample as one audio sample, so a
    256-sample layer tops out at 128 Hz even though its probe is later
    stretched over the full 1.024 s window.
    """
    return spec.layer_samples(layer_index) / 2.0


def stft_magnitude(signal, n_fft: int = 512, hop: int = 128,
                   rate: int = OUTPUT_RATE):
    """Plain Hann-windowed STFT magnitude.

    Returns (freqs, times, mag) with mag shaped (n_fft // 2 + 1, frames).
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < n_fft:
        raise ValidationError(
            f"signal must be 1-D with at least n_fft={n_fft} samples, got shape {x.shape}"
        )
    if hop <= 0 or n_fft <= 0:
        raise ValidationError("n_fft and hop must be positive")
    window = np.hanning(n_fft)
    n_frames = (x.shape[0] - n_fft) // hop + 1
    frames = np.lib.stride_tricks.sliding_window_view(x, n_fft)[::hop][:n_frames]
    mag = np.abs(np.fft.rfft(frames * window, axis=1)).T
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / rate)
    times = (np.arange(n_frames) * hop + n_fft / 2.0) / rate
    return freqs, times, mag
