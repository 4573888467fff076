"""F0 tracking by normalized autocorrelation.

Per frame the normalized cross-correlation is evaluated over the lag
band [rate/ceiling, rate/floor]; the lowest lag among near-maximal local
peaks wins (guards against octave errors on strongly periodic input) and
is refined parabolically. Frames whose peak falls below the voicing
threshold are unvoiced. No cross-frame smoothing is applied.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..exceptions import ValidationError
from ..validation import as_float_vector, check_positive
from ._dsp import frame_times, frame_view
from .tracks import PitchTrack

#: floor/ceiling pairs used throughout: generator outputs, voice default,
#: and the lowered band for slow inner-layer probes
F0_PRESETS = {
    "output": (60.0, 300.0),
    "speech": (75.0, 450.0),
    "probe": (5.0, 150.0),
}


class PitchTracker(BaseEstimator):
    """Frame-based F0 estimator.

    Parameters
    ----------
    floor, ceiling : float
        F0 search band in Hz; voiced estimates are clamped inside it.
    frame_s : float
        Nominal frame length in seconds. Frames grow automatically when
        the floor needs lags longer than the nominal frame.
    hop_s : float
        Hop between frames in seconds.
    voicing_threshold : float
        Minimum normalized correlation for a frame to count as voiced.
    """

    def __init__(self, floor: float = 60.0, ceiling: float = 300.0,
                 frame_s: float = 0.040, hop_s: float = 0.010,
                 voicing_threshold: float = 0.45):
        self.floor = floor
        self.ceiling = ceiling
        self.frame_s = frame_s
        self.hop_s = hop_s
        self.voicing_threshold = voicing_threshold

    def fit(self, X=None, y=None):
        """No training involved; present for estimator-API compatibility."""
        return self

    def track(self, signal, rate: float) -> PitchTrack:
        floor, ceiling = float(self.floor), float(self.ceiling)
        check_positive(floor, "floor")
        if ceiling <= floor:
            raise ValidationError(f"ceiling ({ceiling}) must exceed floor ({floor})")
        if rate < 2.0 * ceiling:
            raise ValidationError(
                f"rate {rate} too low for ceiling {ceiling} (need rate >= 2*ceiling)"
            )
        x = as_float_vector(signal, "signal", min_len=2)

        lag_min = max(2, int(np.floor(rate / ceiling)))
        lag_max = int(np.ceil(rate / floor)) + 1
        hop = max(1, int(round(self.hop_s * rate)))
        # the frame must hold the longest lag plus a full correlation window
        frame_len = max(int(round(self.frame_s * rate)), 2 * lag_max + 2)
        if x.shape[0] < frame_len + hop:
            raise ValidationError(
                f"signal too short: need at least 2 frames of {frame_len} samples"
            )
        corr_len = frame_len - lag_max

        frames = frame_view(x, frame_len, hop)
        frames = frames - frames.mean(axis=1, keepdims=True)
        n_frames = frames.shape[0]
        f0 = np.full(n_frames, np.nan)

        lo = max(1, lag_min - 1)
        for i in range(n_frames):
            frame = frames[i]
            peak = self._best_lag(frame, lo, lag_min, lag_max, corr_len)
            if peak is None:
                continue
            f0[i] = min(max(rate / peak, floor), ceiling)

        times = frame_times(n_frames, frame_len, hop, rate)
        return PitchTrack(times=times, f0=f0, floor=floor, ceiling=ceiling)

    def _best_lag(self, frame: np.ndarray, lo: int, lag_min: int, lag_max: int,
                  corr_len: int):
        """Refined lag of the winning correlation peak, or None if unvoiced."""
        window = frame[:corr_len]
        e0 = float(window @ window)
        if e0 <= 0.0:
            return None
        sq = np.concatenate([[0.0], np.cumsum(frame * frame)])
        lags = np.arange(lo, lag_max + 1)  # frame holds a full window up to lag_max
        energy = sq[lags + corr_len] - sq[lags]
        num = np.correlate(frame, window, mode="valid")[lo : lag_max + 1]
        denom = np.sqrt(e0 * energy)
        r = np.where(denom > 0.0, num / np.maximum(denom, 1e-300), 0.0)

        # indices of the searched band inside r (which spans lo..lag_max)
        band = slice(lag_min - lo, lag_max - lo + 1)
        band_vals = r[band]
        if band_vals.size == 0:
            return None
        rmax = float(np.max(band_vals))
        if rmax < self.voicing_threshold:
            return None
        interior = np.arange(1, r.shape[0] - 1)
        is_peak = (r[interior] >= r[interior - 1]) & (r[interior] >= r[interior + 1])
        peaks = interior[is_peak]
        peaks = peaks[(peaks >= lag_min - lo) & (peaks <= lag_max - lo)]
        peaks = peaks[r[peaks] >= rmax - 0.02]
        if peaks.size == 0:
            idx = int(np.argmax(band_vals)) + (lag_min - lo)
        else:
            idx = int(peaks[0])  # lowest lag among near-maximal peaks
        lag = idx + lo
        if 0 < idx < r.shape[0] - 1:
            a, b, c = r[idx - 1], r[idx], r[idx + 1]
            denom2 = a - 2.0 * b + c
            if denom2 < 0.0:
                delta = 0.5 * (a - c) / denom2
                lag = lag + float(np.clip(delta, -0.5, 0.5))
        return lag


def track_f0(signal, rate: float, floor: float = 60.0, ceiling: float = 300.0) -> PitchTrack:
    """Functional form of :class:`PitchTracker` with the output preset."""
    return PitchTracker(floor=floor, ceiling=ceiling).track(signal, rate)
