"""Minimal SVG rendering of an entropy diagram."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = ["entropy_svg", "write_entropy_svg"]

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _nice_ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def entropy_svg(
    entropy: Sequence[float],
    clusters: Optional[Sequence[int]] = None,
    width: int = 800,
    height: int = 300,
    title: str = "Entropy diagram",
) -> str:
    """Polyline of entropy against slice index, markers coloured by cluster."""
    e = np.asarray(entropy, dtype=float)
    m = e.shape[0]
    left, right, top, bottom = 60, 20, 30, 40
    pw, ph = width - left - right, height - top - bottom
    ymin, ymax = float(e.min()) if m else 0.0, float(e.max()) if m else 1.0
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad
    xmax = max(m - 1, 1)

    def sx(i):
        return left + pw * i / xmax

    def sy(v):
        return top + ph * (1.0 - (v - ymin) / (ymax - ymin))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in _nice_ticks(0, xmax):
        if t > xmax:
            continue
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" text-anchor="middle">{int(t)}</text>')
    for t in _nice_ticks(ymin, ymax):
        if not ymin <= t <= ymax:
            continue
        y = sy(t)
        out.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 6}" text-anchor="middle">slice index</text>'
    )
    out.append(
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">entropy</text>'
    )
    if m:
        pts = " ".join(f"{sx(i):.2f},{sy(v):.2f}" for i, v in enumerate(e))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#555555" stroke-width="1"/>')
        for i, v in enumerate(e):
            c = PALETTE[int(clusters[i]) % len(PALETTE)] if clusters is not None else PALETTE[0]
            out.append(f'<circle cx="{sx(i):.2f}" cy="{sy(v):.2f}" r="3" fill="{c}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_entropy_svg(path, entropy, clusters=None, **kwargs) -> None:
    Path(path).write_text(entropy_svg(entropy, clusters, **kwargs), encoding="utf-8")
