"""CSV tables and dependency-free SVG line plots.

CSV floats are written with repr so a re-read reproduces every value
bit-for-bit. The SVG writer draws one polyline per series on a shared
normalized-time axis; probe overlays pass their scale hint as ``scale``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import ValidationError
from ..validation import as_float_vector
from .atomic import atomic_write_text

PALETTE = ("#2ca02c", "#ff7f0e", "#1f77b4", "#d62728", "#9467bd",
           "#8c564b", "#17becf", "#7f7f7f")


def format_float(value: float) -> str:
    """Shortest decimal string that parses back to the same float."""
    return repr(float(value))


def write_columns_csv(path, header: list[str], columns: list) -> None:
    """Write equal-length columns; floats keep full precision."""
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValidationError(f"{len(header)} header names for {len(cols)} columns")
    n = cols[0].shape[0] if cols else 0
    for c in cols:
        if c.shape[0] != n:
            raise ValidationError("columns must have equal length")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for i in range(n):
        row = []
        for c in cols:
            v = c[i]
            if isinstance(v, (np.floating, float)):
                row.append(format_float(float(v)))
            else:
                row.append(str(v))
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def read_columns_csv(path) -> dict[str, np.ndarray]:
    """Read a columns CSV back; numeric columns become float64 arrays."""
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError(f"{path}: empty CSV")
    header = rows[0]
    data = {name: [] for name in header}
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != len(header):
            raise ValidationError(f"{path}: ragged row {row!r}")
        for name, value in zip(header, row):
            data[name].append(value)
    out = {}
    for name, values in data.items():
        try:
            out[name] = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError:
            out[name] = np.array(values, dtype=object)
    return out


@dataclass(frozen=True)
class PlotSeries:
    label: str
    values: np.ndarray = field(repr=False)
    scale: float = 1.0

    def __post_init__(self):
        values = as_float_vector(self.values, f"series {self.label!r}", min_len=1)
        object.__setattr__(self, "values", values)
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"series {self.label!r}: scale must be positive")


def emit_plot(series: list[PlotSeries], out_base) -> tuple[Path, Path]:
    """Write ``<out_base>.csv`` and ``<out_base>.svg``; returns both paths.

    The CSV stores the raw values in long form (series,t,value); the SVG
    overlays the scaled series on a shared 0..1 time axis.
    """
    out_base = Path(out_base)
    csv_path = out_base.with_suffix(".csv")
    svg_path = out_base.with_suffix(".svg")

    labels, ts, values = [], [], []
    for s in series:
        labels.extend([s.label] * s.values.shape[0])
        ts.extend(range(s.values.shape[0]))
        values.extend(s.values.tolist())
    write_columns_csv(csv_path, ["series", "t", "value"],
                      [np.array(labels, dtype=object), np.array(ts), np.array(values)])
    atomic_write_text(svg_path, render_svg(series))
    return csv_path, svg_path


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def render_svg(series: list[PlotSeries], width: int = 960, height: int = 540) -> str:
    left, right, top, bottom = 70, 180, 30, 50
    plot_w = width - left - right
    plot_h = height - top - bottom

    scaled = [s.values * s.scale for s in series]
    if scaled:
        y_lo = min(float(v.min()) for v in scaled)
        y_hi = max(float(v.max()) for v in scaled)
    else:
        y_lo, y_hi = 0.0, 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(frac: float) -> float:
        return left + frac * plot_w

    def sy(value: float) -> float:
        return top + (y_hi - value) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    for tick in _ticks(0.0, 1.0):
        x = sx(tick)
        parts.append(
            f'<line x1="{x:.3f}" y1="{top + plot_h}" x2="{x:.3f}" '
            f'y2="{top + plot_h + 6}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{x:.3f}" y="{top + plot_h + 22}" font-size="12" '
            f'text-anchor="middle" fill="#222">{tick:.2f}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        y = sy(tick)
        parts.append(
            f'<line x1="{left - 6}" y1="{y:.3f}" x2="{left}" y2="{y:.3f}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{left - 10}" y="{y + 4:.3f}" font-size="12" '
            f'text-anchor="end" fill="#222">{tick:.4g}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.3f}" y="{height - 12}" font-size="13" '
        f'text-anchor="middle" fill="#222">normalized time</text>'
    )
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        vals = scaled[i]
        n = vals.shape[0]
        if n == 1:
            points = f"{sx(0.0):.3f},{sy(vals[0]):.3f} {sx(1.0):.3f},{sy(vals[0]):.3f}"
        else:
            coords = []
            for j in range(n):
                coords.append(f"{sx(j / (n - 1)):.3f},{sy(vals[j]):.3f}")
            points = " ".join(coords)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = top + 18 + 20 * i
        lx = left + plot_w + 14
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        label = s.label.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        parts.append(
            f'<text x="{lx + 30}" y="{ly}" font-size="12" fill="#222">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
