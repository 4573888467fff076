"""Acoustic measurement suite: F0, intensity, formants, durations."""

from .formants import FormantTracker, levinson, track_formants
from .intensity import DB_FLOOR, IntensityTracker, track_intensity
from .pitch import F0_PRESETS, PitchTracker, track_f0
from .tracks import (
    OUTPUT_DURATION,
    AnnotationTier,
    FormantTrack,
    IntensityTrack,
    Interval,
    PitchTrack,
    ScalarSeries,
    measure_durations,
    normalized_time_sample,
    parse_tier,
    read_tier,
    write_tier,
)

__all__ = [
    "AnnotationTier",
    "DB_FLOOR",
    "F0_PRESETS",
    "FormantTrack",
    "FormantTracker",
    "IntensityTrack",
    "IntensityTracker",
    "Interval",
    "OUTPUT_DURATION",
    "PitchTrack",
    "PitchTracker",
    "ScalarSeries",
    "levinson",
    "measure_durations",
    "normalized_time_sample",
    "parse_tier",
    "read_tier",
    "track_f0",
    "track_formants",
    "track_intensity",
    "write_tier",
]
