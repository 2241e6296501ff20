"""Minimal self-contained SVG plots (fixed 800x600 viewBox, no external assets)."""
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = 60


def _scale(values, lo_px, hi_px):
    v = np.asarray(values, dtype=float)
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo_px + (v - lo) / (hi - lo) * (hi_px - lo_px), (lo, hi)


def _frame(title, xlabel, ylabel, xr, yr):
    fmt = "{:.4g}".format
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 15 {HEIGHT / 2})">{escape(ylabel)}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 18}" font-size="11">{fmt(xr[0])}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 18}" text-anchor="end" font-size="11">{fmt(xr[1])}</text>',
        f'<text x="{MARGIN - 5}" y="{HEIGHT - MARGIN}" text-anchor="end" font-size="11">{fmt(yr[0])}</text>',
        f'<text x="{MARGIN - 5}" y="{MARGIN + 10}" text-anchor="end" font-size="11">{fmt(yr[1])}</text>',
    ]


def line_plot(x, y, path, title="", xlabel="", ylabel=""):
    px, xr = _scale(x, MARGIN, WIDTH - MARGIN)
    py, yr = _scale(y, HEIGHT - MARGIN, MARGIN)
    parts = _frame(title, xlabel, ylabel, xr, yr)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    parts.append(f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def scatter_plot(x, y, path, title="", xlabel="", ylabel=""):
    px, xr = _scale(x, MARGIN, WIDTH - MARGIN)
    py, yr = _scale(y, HEIGHT - MARGIN, MARGIN)
    parts = _frame(title, xlabel, ylabel, xr, yr)
    for a, b in zip(px, py):
        parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="firebrick"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
