"""Minimal standalone SVG line chart, no plotting dependency."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape


def _nice(v: float) -> str:
    return f"{v:.4g}"


def line_chart(xs, ys, title: str = "", xlabel: str = "", ylabel: str = "",
               width: int = 640, height: int = 400) -> str:
    """Return the SVG text for a single polyline of ``ys`` against ``xs``."""
    if len(xs) != len(ys) or not xs:
        raise ValueError("need equally long, non-empty x and y sequences")
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if not pts:
        raise ValueError("no finite points to plot")
    left, right, top, bottom = 80, 20, 40, 50
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        pad = abs(y0) * 1e-3 or 0.5
        y0, y1 = y0 - pad, y1 + pad
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{sx(fx):.1f}" y="{top + ph + 16}" text-anchor="middle">{_nice(fx)}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(fy) + 4:.1f}" text-anchor="end">{_nice(fy)}</text>')
        out.append(f'<line x1="{left}" x2="{left + pw}" y1="{sy(fy):.1f}" y2="{sy(fy):.1f}" '
                   'stroke="#ddd"/>')
    out.append(f'<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{poly}"/>')
    if title:
        out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
