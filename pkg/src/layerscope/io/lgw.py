"""The .lgw container: portable weight and tensor storage.

Layout: magic ``LGW1``, a 4-byte little-endian header length, a UTF-8
JSON header, then tightly packed little-endian float32 tensors in
row-major order. Tensor offsets are relative to the start of the data
section. The header is serialized canonically (sorted keys, no spaces)
so re-exporting an unchanged bundle is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..exceptions import (
    BadMagicError,
    NonFiniteValueError,
    SpecMismatchError,
    TruncatedFileError,
    WeightFormatError,
)
from ..generator import GeneratorSpec, WeightBundle
from .atomic import atomic_write_bytes

MAGIC = b"LGW1"
FORMAT_VERSION = 1


def spec_hash(spec: GeneratorSpec) -> str:
    canon = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _canonical_header_bytes(header: dict) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_container(path, header_extra: dict, tensors) -> None:
    """Write a generic container; ``tensors`` is an iterable of (name, array)."""
    table = []
    blobs = []
    offset = 0
    for name, arr in tensors:
        arr = np.asarray(arr, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValueError(f"tensor {name} contains non-finite values")
        blob = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        table.append(
            {"name": name, "shape": list(arr.shape), "dtype": "f32", "offset": offset}
        )
        blobs.append(blob)
        offset += len(blob)
    header = dict(header_extra)
    header["format"] = "lgw"
    header["version"] = FORMAT_VERSION
    header["tensors"] = table
    header_bytes = _canonical_header_bytes(header)
    payload = MAGIC + struct.pack("<I", len(header_bytes)) + header_bytes + b"".join(blobs)
    atomic_write_bytes(path, payload)


def read_container(path) -> tuple[dict, dict]:
    """Read a container: returns (header, {tensor name: float64 array})."""
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise TruncatedFileError(f"{path}: too short for magic and header length")
    if raw[:4] != MAGIC:
        raise BadMagicError(f"{path}: bad magic {raw[:4]!r}")
    (header_len,) = struct.unpack("<I", raw[4:8])
    if len(raw) < 8 + header_len:
        raise TruncatedFileError(f"{path}: header truncated")
    try:
        header = json.loads(raw[8 : 8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WeightFormatError(f"{path}: header is not valid JSON: {exc}", "bad_header")
    if not isinstance(header, dict) or header.get("format") != "lgw":
        raise WeightFormatError(f"{path}: missing format marker", "bad_header")
    table = header.get("tensors")
    if not isinstance(table, list):
        raise WeightFormatError(f"{path}: missing tensor table", "bad_header")
    data = raw[8 + header_len :]
    tensors = {}
    for entry in table:
        try:
            name = entry["name"]
            shape = tuple(int(s) for s in entry["shape"])
            dtype = entry["dtype"]
            offset = int(entry["offset"])
        except (KeyError, TypeError, ValueError) as exc:
            raise WeightFormatError(f"{path}: malformed tensor entry: {exc}", "bad_header")
        if dtype != "f32":
            raise WeightFormatError(f"{path}: unsupported dtype {dtype!r}", "bad_header")
        count = 1
        for s in shape:
            count *= s
        end = offset + 4 * count
        if offset < 0 or end > len(data):
            raise TruncatedFileError(f"{path}: tensor {name} exceeds data section")
        arr = np.frombuffer(data[offset:end], dtype="<f4").reshape(shape).astype(np.float64)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValueError(f"{path}: tensor {name} contains non-finite values")
        tensors[name] = arr
    return header, tensors


def save_weights(bundle: WeightBundle, path) -> None:
    """Serialize a weight bundle to ``path`` in .lgw form."""
    header = {
        "model": {
            "model_name": bundle.model_name,
            "trained_steps": int(bundle.trained_steps),
        },
        "spec": bundle.spec.to_dict(),
        "spec_hash": spec_hash(bundle.spec),
    }
    write_container(path, header, bundle.named_tensors())


def load_weights(path) -> WeightBundle:
    """Read a .lgw weight file back into a validated WeightBundle."""
    header, tensors = read_container(path)
    if "spec" not in header:
        raise WeightFormatError(f"{path}: header has no spec", "bad_header")
    try:
        spec = GeneratorSpec.from_dict(header["spec"])
    except Exception as exc:
        raise SpecMismatchError(f"{path}: invalid spec: {exc}")
    stored_hash = header.get("spec_hash")
    if stored_hash is not None and stored_hash != spec_hash(spec):
        raise SpecMismatchError(f"{path}: spec hash does not match spec contents")
    model = header.get("model", {})
    names = ["dense/weight", "dense/bias"]
    for i in range(len(spec.layers)):
        names.extend([f"conv{i}/kernel", f"conv{i}/bias"])
    missing = [n for n in names if n not in tensors]
    if missing:
        raise SpecMismatchError(f"{path}: missing tensors {missing}")
    try:
        return WeightBundle(
            spec=spec,
            dense_weight=tensors["dense/weight"],
            dense_bias=tensors["dense/bias"],
            conv_weights=tuple(
                tensors[f"conv{i}/kernel"] for i in range(len(spec.layers))
            ),
            conv_biases=tuple(tensors[f"conv{i}/bias"] for i in range(len(spec.layers))),
            model_name=str(model.get("model_name", "untitled")),
            trained_steps=int(model.get("trained_steps", 0)),
        )
    except Exception as exc:
        raise SpecMismatchError(f"{path}: tensors do not fit spec: {exc}")
