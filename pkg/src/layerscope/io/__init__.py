"""Persistence: weight containers, WAV, CSV/SVG plots, run manifests."""

from .atomic import atomic_write_bytes, atomic_write_text
from .lgw import (
    load_weights,
    read_container,
    save_weights,
    spec_hash,
    write_container,
)
from .manifest import (
    MANIFEST_NAME,
    build_manifest,
    read_manifest,
    sha256_file,
    verify_manifest,
    write_manifest,
)
from .plotio import (
    PlotSeries,
    emit_plot,
    format_float,
    read_columns_csv,
    render_svg,
    write_columns_csv,
)
from .wavio import DEFAULT_RATE, WavFile, read_wav, write_wav

__all__ = [
    "DEFAULT_RATE",
    "MANIFEST_NAME",
    "PlotSeries",
    "WavFile",
    "atomic_write_bytes",
    "atomic_write_text",
    "build_manifest",
    "emit_plot",
    "format_float",
    "load_weights",
    "read_columns_csv",
    "read_container",
    "read_manifest",
    "read_wav",
    "render_svg",
    "save_weights",
    "sha256_file",
    "spec_hash",
    "verify_manifest",
    "write_columns_csv",
    "write_container",
    "write_manifest",
    "write_wav",
]
