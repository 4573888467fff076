"""Minimal RIFF/WAVE reader and writer: 16 kHz mono, float32 or PCM-16.

Float files round-trip bit-exactly; PCM-16 quantizes symmetrically by
32767 so the round-trip error stays below 1/32768.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import ValidationError
from ..validation import as_float_vector
from .atomic import atomic_write_bytes

DEFAULT_RATE = 16000
ENCODINGS = ("float32", "pcm16")


@dataclass(frozen=True)
class WavFile:
    samples: np.ndarray = field(repr=False)
    rate: int = DEFAULT_RATE
    encoding: str = "float32"


def write_wav(signal, path, encoding: str = "float32", rate: int = DEFAULT_RATE) -> None:
    x = as_float_vector(signal, "signal", min_len=1)
    if encoding not in ENCODINGS:
        raise ValidationError(f"encoding must be one of {ENCODINGS}, got {encoding!r}")
    if not isinstance(rate, (int, np.integer)) or rate <= 0:
        raise ValidationError(f"rate must be a positive integer, got {rate!r}")

    if encoding == "float32":
        payload = x.astype("<f4").tobytes()
        fmt = struct.pack("<HHIIHH", 3, 1, rate, rate * 4, 4, 32)
        fact = struct.pack("<I", x.shape[0])
        chunks = [(b"fmt ", fmt), (b"fact", fact), (b"data", payload)]
    else:
        ints = np.clip(np.round(np.clip(x, -1.0, 1.0) * 32767.0), -32767, 32767)
        payload = ints.astype("<i2").tobytes()
        fmt = struct.pack("<HHIIHH", 1, 1, rate, rate * 2, 2, 16)
        chunks = [(b"fmt ", fmt), (b"data", payload)]

    body = b"WAVE"
    for tag, data in chunks:
        body += tag + struct.pack("<I", len(data)) + data
        if len(data) % 2:
            body += b"\x00"
    blob = b"RIFF" + struct.pack("<I", len(body)) + body
    atomic_write_bytes(path, blob)


def read_wav(path) -> WavFile:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise ValidationError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt_fields = None
    payload = None
    while pos + 8 <= len(raw):
        tag = raw[pos : pos + 4]
        (size,) = struct.unpack("<I", raw[pos + 4 : pos + 8])
        data = raw[pos + 8 : pos + 8 + size]
        if len(data) < size:
            raise ValidationError(f"{path}: chunk {tag!r} truncated")
        if tag == b"fmt ":
            if size < 16:
                raise ValidationError(f"{path}: fmt chunk too short")
            fmt_fields = struct.unpack("<HHIIHH", data[:16])
        elif tag == b"data":
            payload = data
        pos += 8 + size + (size % 2)
    if fmt_fields is None or payload is None:
        raise ValidationError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = fmt_fields
    if channels != 1:
        raise ValidationError(f"{path}: expected mono, got {channels} channels")
    if audio_format == 3 and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        encoding = "float32"
    elif audio_format == 1 and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32767.0
        encoding = "pcm16"
    else:
        raise ValidationError(
            f"{path}: unsupported format (tag {audio_format}, {bits} bits)"
        )
    if samples.shape[0] == 0:
        raise ValidationError(f"{path}: empty data chunk")
    return WavFile(samples=samples, rate=int(rate), encoding=encoding)
