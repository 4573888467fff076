"""Track containers, annotation tiers, and time-normalized sampling.

Unvoiced or unmeasurable frames are carried as NaN so that track arrays
stay aligned with their time axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import ValidationError
from ..io.atomic import atomic_write_text
from ..validation import as_float_vector, check_positive_int

#: generator outputs last 16384 / 16000 seconds
OUTPUT_DURATION = 1.024


def _check_times(times: np.ndarray) -> None:
    if times.shape[0] > 1 and not np.all(np.diff(times) > 0):
        raise ValidationError("track times must be strictly increasing")


@dataclass(frozen=True)
class ScalarSeries:
    """A (times, values) pair; the shape every track reduces to."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if times.shape != values.shape or times.ndim != 1:
            raise ValidationError(
                f"times and values must be matching vectors, got {times.shape} and {values.shape}"
            )
        _check_times(times)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class PitchTrack:
    times: np.ndarray
    f0: np.ndarray
    floor: float
    ceiling: float

    def __post_init__(self):
        times = as_float_vector(self.times, "times")
        f0 = np.asarray(self.f0, dtype=np.float64)
        if f0.shape != times.shape:
            raise ValidationError("f0 and times must have matching length")
        _check_times(times)
        voiced = np.isfinite(f0)
        if np.any(voiced):
            vals = f0[voiced]
            if np.any(vals < self.floor) or np.any(vals > self.ceiling):
                raise ValidationError("voiced f0 values must lie within [floor, ceiling]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "f0", f0)

    @property
    def values(self) -> np.ndarray:
        return self.f0

    @property
    def voiced(self) -> np.ndarray:
        return np.isfinite(self.f0)


@dataclass(frozen=True)
class IntensityTrack:
    times: np.ndarray
    db: np.ndarray
    min_pitch: float

    def __post_init__(self):
        times = as_float_vector(self.times, "times")
        db = as_float_vector(self.db, "db")
        if db.shape != times.shape:
            raise ValidationError("db and times must have matching length")
        _check_times(times)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "db", db)

    @property
    def values(self) -> np.ndarray:
        return self.db


@dataclass(frozen=True)
class FormantTrack:
    times: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    nyquist: float
    n_skipped: int = 0

    def __post_init__(self):
        times = as_float_vector(self.times, "times")
        _check_times(times)
        arrays = {}
        for name in ("f1", "f2", "b1", "b2"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != times.shape:
                raise ValidationError(f"{name} and times must have matching length")
            arrays[name] = arr
        both = np.isfinite(arrays["f1"]) & np.isfinite(arrays["f2"])
        if np.any(both):
            f1v, f2v = arrays["f1"][both], arrays["f2"][both]
            if np.any(f1v <= 0) or np.any(f1v >= f2v) or np.any(f2v >= self.nyquist):
                raise ValidationError("formants must satisfy 0 < f1 < f2 < nyquist")
        object.__setattr__(self, "times", times)
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    def series(self, which: str) -> ScalarSeries:
        if which not in ("f1", "f2", "b1", "b2"):
            raise ValidationError(f"unknown formant series {which!r}")
        return ScalarSeries(times=self.times, values=getattr(self, which))


@dataclass(frozen=True)
class Interval:
    start: float
    end: float
    label: str

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class AnnotationTier:
    """Ordered, non-overlapping labelled intervals over one signal."""

    intervals: tuple[Interval, ...]
    source_layer: int | None = None
    max_time: float = OUTPUT_DURATION

    def __post_init__(self):
        intervals = tuple(self.intervals)
        prev_end = 0.0
        for iv in intervals:
            if not (np.isfinite(iv.start) and np.isfinite(iv.end)):
                raise ValidationError("interval bounds must be finite")
            if iv.start < 0 or iv.end > self.max_time + 1e-9:
                raise ValidationError(
                    f"interval [{iv.start}, {iv.end}] outside [0, {self.max_time}]"
                )
            if iv.end <= iv.start:
                raise ValidationError(f"interval end must exceed start, got [{iv.start}, {iv.end}]")
            if iv.start < prev_end - 1e-12:
                raise ValidationError("intervals must be ordered and non-overlapping")
            prev_end = iv.end
        object.__setattr__(self, "intervals", intervals)

    def with_label(self, label: str) -> list[Interval]:
        return [iv for iv in self.intervals if iv.label == label]


def parse_tier(text: str, source_layer: int | None = None,
               max_time: float = OUTPUT_DURATION) -> AnnotationTier:
    """Parse tab-separated interval lines: ``start<TAB>end<TAB>label``."""
    intervals = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"tier line {lineno}: expected start<TAB>end<TAB>label")
        try:
            start, end = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValidationError(f"tier line {lineno}: bounds must be numbers")
        intervals.append(Interval(start=start, end=end, label=parts[2].strip()))
    return AnnotationTier(intervals=tuple(intervals), source_layer=source_layer,
                          max_time=max_time)


def read_tier(path, source_layer: int | None = None,
              max_time: float = OUTPUT_DURATION) -> AnnotationTier:
    return parse_tier(Path(path).read_text(encoding="utf-8"),
                      source_layer=source_layer, max_time=max_time)


def write_tier(tier: AnnotationTier, path) -> None:
    lines = [f"{iv.start:.6f}\t{iv.end:.6f}\t{iv.label}" for iv in tier.intervals]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def measure_durations(tier_a: AnnotationTier, tier_b: AnnotationTier, label: str) -> np.ndarray:
    """Paired durations (seconds) of ``label`` intervals, in tier order."""
    a = tier_a.with_label(label)
    b = tier_b.with_label(label)
    if len(a) != len(b):
        raise ValidationError(
            f"label {label!r} appears {len(a)} times in tier a but {len(b)} in tier b"
        )
    return np.array([[ia.duration, ib.duration] for ia, ib in zip(a, b)]).reshape(-1, 2)


def normalized_time_sample(track, interval: Interval, n_bins: int) -> np.ndarray:
    """Sample a track at ``n_bins`` equally spaced bin centers of an interval.

    Values come from linear interpolation over the measurable (finite)
    frames; interior unmeasured gaps are bridged by the surrounding
    frames and bin centers outside the measured span take the nearest
    measured value. A track with no measurable frame yields all-NaN.
    """
    check_positive_int(n_bins, "n_bins")
    times = np.asarray(track.times, dtype=np.float64)
    values = np.asarray(track.values, dtype=np.float64)
    if times.shape[0] == 0:
        raise ValidationError("track has no frames")
    if interval.end <= times[0] or interval.start >= times[-1]:
        raise ValidationError(
            f"interval [{interval.start}, {interval.end}] does not overlap track span "
            f"[{times[0]}, {times[-1]}]"
        )
    width = (interval.end - interval.start) / n_bins
    centers = interval.start + (np.arange(n_bins) + 0.5) * width
    finite = np.isfinite(values)
    if not np.any(finite):
        return np.full(n_bins, np.nan)
    return np.interp(centers, times[finite], values[finite])
