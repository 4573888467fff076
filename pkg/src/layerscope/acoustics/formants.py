"""Formant tracking: autocorrelation LPC with a bandwidth gate.

The signal is resampled to twice the formant ceiling, pre-emphasized,
and analyzed framewise with Levinson-Durbin. Pole pairs of the
prediction polynomial become formant candidates; only poles narrower
than 400 Hz bandwidth survive, and the two lowest surviving frequencies
are reported as F1 and F2.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..exceptions import ValidationError
from ..validation import as_float_vector, check_positive, check_positive_int
from ._dsp import frame_times, frame_view, resample_to_rate
from .tracks import FormantTrack

BANDWIDTH_CEILING = 400.0
EDGE_MARGIN = 50.0


def levinson(r: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Solve the autocorrelation normal equations.

    Returns (a, err) with a[0] = 1 and A(z) = sum a[k] z^-k. Raises
    ValidationError when the autocorrelation is not positive definite
    (the prediction error hits zero or below before the final order).
    """
    r = as_float_vector(r, "autocorrelation", min_len=order + 1)
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    if err <= 0.0:
        raise ValidationError("autocorrelation is not positive definite at lag 0")
    for i in range(1, order + 1):
        acc = r[i] + a[1:i] @ r[1:i][::-1]
        k = -acc / err
        a[1 : i + 1] = a[1 : i + 1] + k * a[i - 1 :: -1]
        err *= 1.0 - k * k
        if err <= 0.0:
            raise ValidationError(f"prediction error collapsed at order {i}")
    return a, float(err)


def _pole_candidates(a: np.ndarray, fs: float) -> list[tuple[float, float]]:
    """(frequency, bandwidth) pairs from stable complex poles, sorted by frequency."""
    roots = np.roots(a)
    out = []
    for root in roots:
        if root.imag <= 1e-9:
            continue
        mag = abs(root)
        if mag >= 1.0 or mag <= 0.0:
            continue
        freq = float(np.arctan2(root.imag, root.real) * fs / (2.0 * np.pi))
        bw = float(-np.log(mag) * fs / np.pi)
        if EDGE_MARGIN < freq < fs / 2.0 - EDGE_MARGIN and 0.0 < bw < BANDWIDTH_CEILING:
            out.append((freq, bw))
    out.sort()
    return out


class FormantTracker(BaseEstimator):
    """LPC formant estimator reporting F1 and F2 only."""

    def __init__(self, max_formant: float = 5000.0, lpc_order: int = 10,
                 frame_s: float = 0.025, hop_s: float = 0.010,
                 preemphasis: float = 0.97):
        self.max_formant = max_formant
        self.lpc_order = lpc_order
        self.frame_s = frame_s
        self.hop_s = hop_s
        self.preemphasis = preemphasis

    def fit(self, X=None, y=None):
        """No training involved; present for estimator-API compatibility."""
        return self

    def track(self, signal, rate: float) -> FormantTrack:
        check_positive(self.max_formant, "max_formant")
        order = check_positive_int(self.lpc_order, "lpc_order")
        fs = 2.0 * float(self.max_formant)
        if rate < fs:
            raise ValidationError(
                f"rate {rate} too low for max_formant {self.max_formant} (need rate >= {fs})"
            )
        x = as_float_vector(signal, "signal", min_len=2)
        y = resample_to_rate(x, rate, fs)
        c = float(self.preemphasis)
        y = np.concatenate([[y[0] * (1.0 - c)], y[1:] - c * y[:-1]])

        frame_len = int(round(self.frame_s * fs))
        hop = max(1, int(round(self.hop_s * fs)))
        if y.shape[0] < frame_len:
            raise ValidationError(
                f"signal too short for one {frame_len}-sample analysis frame"
            )
        if frame_len <= order + 1:
            raise ValidationError("frame shorter than LPC order")
        frames = frame_view(y, frame_len, hop)
        frames = frames - frames.mean(axis=1, keepdims=True)
        window = np.hamming(frame_len)
        all_times = frame_times(frames.shape[0], frame_len, hop, fs)

        times, f1s, f2s, b1s, b2s = [], [], [], [], []
        n_skipped = 0
        for i in range(frames.shape[0]):
            frame = frames[i] * window
            energy = float(frame @ frame)
            if energy <= 1e-14 * frame_len:
                continue  # silence: no frame emitted
            full = np.correlate(frame, frame, mode="full")
            r = full[frame_len - 1 : frame_len + order]
            try:
                a, _ = levinson(r, order)
            except ValidationError:
                n_skipped += 1
                continue
            candidates = _pole_candidates(a, fs)
            times.append(all_times[i])
            if len(candidates) >= 2:
                f1s.append(candidates[0][0])
                b1s.append(candidates[0][1])
                f2s.append(candidates[1][0])
                b2s.append(candidates[1][1])
            else:
                f1s.append(np.nan)
                b1s.append(np.nan)
                f2s.append(np.nan)
                b2s.append(np.nan)
        return FormantTrack(
            times=np.array(times), f1=np.array(f1s), f2=np.array(f2s),
            b1=np.array(b1s), b2=np.array(b2s), nyquist=fs / 2.0,
            n_skipped=n_skipped,
        )


def track_formants(signal, rate: float, max_formant: float = 5000.0,
                   lpc_order: int = 10) -> FormantTrack:
    """Functional form of :class:`FormantTracker`."""
    return FormantTracker(max_formant=max_formant, lpc_order=lpc_order).track(signal, rate)
