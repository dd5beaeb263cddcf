"""Minimal SVG line plots, no dependencies.

Just enough to eyeball a curve against its overlay: autoscaled axes, five
ticks per axis, fixed palette, text legend.  CSV remains the real artifact;
these files are a convenience for format=csv+svg.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 62, 16, 34, 48


def _limits(values: np.ndarray) -> tuple[float, float]:
    lo = float(np.min(values))
    hi = float(np.max(values))
    if not np.isfinite([lo, hi]).all():
        raise ValueError("cannot plot non-finite data")
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_svg(
    path: str | Path,
    title: str,
    xlabel: str,
    ylabel: str,
    series: list[tuple[np.ndarray, np.ndarray, str]],
) -> Path:
    """Polyline plot of (x, y, label) series sharing one axis pair."""
    if not series:
        raise ValueError("need at least one series")
    xlo, xhi = _limits(np.concatenate([np.asarray(s[0], float) for s in series]))
    ylo, yhi = _limits(np.concatenate([np.asarray(s[1], float) for s in series]))

    def sx(v):
        return _ML + (v - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" font-size="14">'
        f"{escape(title)}</text>",
    ]
    axis = f'stroke="#333" stroke-width="1"'
    parts.append(
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" {axis}/>'
    )
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" {axis}/>')
    for frac in np.linspace(0.0, 1.0, 5):
        xv = xlo + frac * (xhi - xlo)
        yv = ylo + frac * (yhi - ylo)
        px, py = sx(xv), sy(yv)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_H - _MB}" x2="{px:.1f}" y2="{_H - _MB + 5}" {axis}/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{_H - _MB + 18}" text-anchor="middle">'
            f"{xv:.4g}</text>"
        )
        parts.append(
            f'<line x1="{_ML - 5}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" {axis}/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{py + 4:.1f}" text-anchor="end">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2:.0f}" y="{_H - 10}" text-anchor="middle">'
        f"{escape(xlabel)}</text>"
    )
    parts.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.0f})">{escape(ylabel)}</text>'
    )
    for idx, (xs, ys, label) in enumerate(series):
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError(f"series {label!r} is not a pair of equal 1-d arrays")
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MT + 16 + 16 * idx
        parts.append(
            f'<line x1="{_W - _MR - 150}" y1="{ly - 4}" x2="{_W - _MR - 130}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{_W - _MR - 124}" y="{ly}">{escape(label)}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
