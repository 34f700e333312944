"""Minimal deterministic SVG writers: line plots and class rasters.

Coordinates are printed with fixed precision so identical data gives
byte-identical documents.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#7f7f7f")

_W, _H = 640, 420
_L, _R, _T, _B = 70, 150, 40, 50


def _num(x):
    return f"{x:.3f}"


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def _axes(out, xlim, ylim, xlabel, ylabel, xfmt=None, yfmt=None):
    x0, x1 = _L, _W - _R
    y0, y1 = _H - _B, _T
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
               'fill="none" stroke="black"/>')
    xfmt = xfmt or (lambda v: f"{v:.3g}")
    yfmt = yfmt or (lambda v: f"{v:.3g}")
    for i, v in enumerate(_ticks(*xlim)):
        px = x0 + (x1 - x0) * i / 4
        out.append(f'<line x1="{_num(px)}" y1="{y0}" x2="{_num(px)}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(px)}" y="{y0 + 18}" text-anchor="middle">{escape(xfmt(v))}</text>')
    for i, v in enumerate(_ticks(*ylim)):
        py = y0 - (y0 - y1) * i / 4
        out.append(f'<line x1="{x0 - 5}" y1="{_num(py)}" x2="{x0}" y2="{_num(py)}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{_num(py + 4)}" text-anchor="end">{escape(yfmt(v))}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{_H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">{escape(ylabel)}</text>')


def _legend(out, names, colors):
    x = _W - _R + 12
    for i, (name, col) in enumerate(zip(names, colors)):
        y = _T + 10 + 18 * i
        out.append(f'<rect x="{x}" y="{y - 9}" width="12" height="12" fill="{col}"/>')
        out.append(f'<text x="{x + 18}" y="{y + 1}">{escape(name)}</text>')


def _limits(arrays):
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo <= 1e-12 * max(1.0, abs(hi)):
        pad = 0.5 * max(1.0, abs(hi))
        return lo - pad, hi + pad
    return lo, hi


def line_plot(series, title="", xlabel="x", ylabel="y", markers=False):
    """SVG text for ``series``, a list of ``(label, x, y)``.

    Non-finite points break the polyline. With ``markers`` points are drawn
    as dots instead of joined.
    """
    xlim = _limits([s[1] for s in series])
    ylim = _limits([s[2] for s in series])
    out = _header(title)
    _axes(out, xlim, ylim, xlabel, ylabel)
    x0, x1 = _L, _W - _R
    y0, y1 = _H - _B, _T

    def px(x):
        return x0 + (x1 - x0) * (x - xlim[0]) / (xlim[1] - xlim[0])

    def py(y):
        return y0 - (y0 - y1) * (y - ylim[0]) / (ylim[1] - ylim[0])

    colors = [PALETTE[i % len(PALETTE)] for i in range(len(series))]
    for (label, xs, ys), col in zip(series, colors):
        runs, cur = [], []
        for x, y in zip(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)):
            if math.isfinite(x) and math.isfinite(y):
                cur.append(f"{_num(px(x))},{_num(py(y))}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for run in runs:
            if markers:
                for pt in run:
                    cx, cy = pt.split(",")
                    out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="{col}"/>')
            else:
                out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" '
                           f'points="{" ".join(run)}"/>')
    _legend(out, [s[0] for s in series], colors)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def class_raster(codes, names, x_values, y_values, title="", xlabel="x", ylabel="y", log=True):
    """SVG raster of integer ``codes[i, j]`` at ``(x_values[i], y_values[j])``.

    ``names[k]`` labels code ``k`` in the legend. Axes are logarithmic when
    ``log`` is set (tick labels show the actual values).
    """
    codes = np.asarray(codes)
    nx, ny = codes.shape
    tr = np.log10 if log else (lambda v: np.asarray(v, dtype=float))
    xs, ys = tr(np.asarray(x_values, dtype=float)), tr(np.asarray(y_values, dtype=float))
    xlim = (float(xs.min()), float(xs.max())) if nx > 1 else (float(xs[0]) - 0.5, float(xs[0]) + 0.5)
    ylim = (float(ys.min()), float(ys.max())) if ny > 1 else (float(ys[0]) - 0.5, float(ys[0]) + 0.5)
    out = _header(title)
    fmt = (lambda v: f"{10 ** v:.3g}") if log else None
    x0, x1 = _L, _W - _R
    y0, y1 = _H - _B, _T
    cw = (x1 - x0) / nx
    ch = (y0 - y1) / ny
    colors = [PALETTE[k % len(PALETTE)] for k in range(len(names))]
    for i in range(nx):
        for j in range(ny):
            out.append(f'<rect x="{_num(x0 + i * cw)}" y="{_num(y0 - (j + 1) * ch)}" '
                       f'width="{_num(cw)}" height="{_num(ch)}" fill="{colors[codes[i, j]]}"/>')
    _axes(out, xlim, ylim, xlabel, ylabel, fmt, fmt)
    _legend(out, names, colors)
    out.append("</svg>")
    return "\n".join(out) + "\n"
