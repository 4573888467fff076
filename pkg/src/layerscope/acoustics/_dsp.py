"""Shared DSP helpers for the acoustic trackers."""

from __future__ import annotations

import numpy as np

from ..exceptions import ValidationError
from ..validation import as_float_vector


def frame_view(x: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    """Strided frames (n_frames, frame_len); requires at least one frame."""
    if x.shape[0] < frame_len:
        raise ValidationError(
            f"signal of {x.shape[0]} samples is shorter than one frame ({frame_len})"
        )
    n_frames = (x.shape[0] - frame_len) // hop + 1
    return np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop][:n_frames]


def frame_times(n_frames: int, frame_len: int, hop: int, rate: float) -> np.ndarray:
    """Frame-center times in seconds."""
    return (np.arange(n_frames) * hop + frame_len / 2.0) / rate


def lowpass_fir(cutoff_hz: float, rate: float, taps: int = 129) -> np.ndarray:
    """Hann-windowed sinc lowpass, unit DC gain, odd length."""
    if taps % 2 == 0:
        taps += 1
    mid = taps // 2
    n = np.arange(taps) - mid
    fc = cutoff_hz / rate
    h = 2.0 * fc * np.sinc(2.0 * fc * n)
    h *= np.hanning(taps)
    return h / h.sum()


def resample_to_rate(signal, rate: float, target_rate: float) -> np.ndarray:
    """Resample by linear interpolation, lowpassing first when decimating."""
    x = as_float_vector(signal, "signal", min_len=2)
    if rate <= 0 or target_rate <= 0:
        raise ValidationError("rates must be positive")
    if rate == target_rate:
        return x.copy()
    if target_rate < rate:
        # keep a guard band below the new Nyquist before interpolating
        h = lowpass_fir(0.45 * target_rate, rate)
        x = np.convolve(x, h, mode="same")
    out_len = max(2, int(round(x.shape[0] * target_rate / rate)))
    positions = np.arange(out_len) * (rate / target_rate)
    positions = np.minimum(positions, x.shape[0] - 1.0)
    return np.interp(positions, np.arange(x.shape[0], dtype=np.float64), x)
