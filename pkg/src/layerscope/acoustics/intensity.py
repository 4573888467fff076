"""Intensity tracking: Hann-weighted mean-square energy in dB.

dB is relative to amplitude 1.0 = 0 dB, so a full-scale sine sits near
-3.01 dB and typical generator material is negative throughout. Silence
clamps to the -120 dB floor.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..exceptions import ValidationError
from ..validation import as_float_vector, check_positive
from ._dsp import frame_times, frame_view
from .tracks import IntensityTrack

DB_FLOOR = -120.0


class IntensityTracker(BaseEstimator):
    """Parameters: ``min_pitch`` sets the window to 3.2 / min_pitch seconds."""

    def __init__(self, min_pitch: float = 100.0, hop_s: float = 0.010):
        self.min_pitch = min_pitch
        self.hop_s = hop_s

    def fit(self, X=None, y=None):
        """No training involved; present for estimator-API compatibility."""
        return self

    def track(self, signal, rate: float) -> IntensityTrack:
        check_positive(self.min_pitch, "min_pitch")
        check_positive(rate, "rate")
        x = as_float_vector(signal, "signal", min_len=1)
        window_len = int(round(3.2 / self.min_pitch * rate))
        if window_len < 2:
            raise ValidationError(f"window of {window_len} samples is too short")
        if window_len > x.shape[0]:
            raise ValidationError(
                f"window of {window_len} samples exceeds signal length {x.shape[0]}"
            )
        hop = max(1, int(round(self.hop_s * rate)))
        window = np.hanning(window_len)
        wsum = window.sum()

        frames = frame_view(x, window_len, hop)
        power = (frames * frames) @ window / wsum
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(np.maximum(power, 0.0))
        db = np.maximum(db, DB_FLOOR)
        times = frame_times(frames.shape[0], window_len, hop, rate)
        return IntensityTrack(times=times, db=db, min_pitch=float(self.min_pitch))


def track_intensity(signal, rate: float, min_pitch: float = 100.0) -> IntensityTrack:
    """Functional form of :class:`IntensityTracker`."""
    return IntensityTracker(min_pitch=min_pitch).track(signal, rate)
