"""Minimal SVG line plots for latent-direction panels."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["stacked_traces_svg", "write_svg"]

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22")


def _fmt(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _nice_ticks(lo, hi, n=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return list(np.arange(start, hi + step / 2, step))


def stacked_traces_svg(traces, title, labels=None, xlabel="lag index", width=640,
                       row_height=56, max_points=800):
    """Render each row of ``traces`` as its own offset polyline.

    All traces share one amplitude scale, the largest absolute value over
    the whole set, so relative lengths stay visible after scaling.
    """
    traces = np.atleast_2d(np.asarray(traces, dtype=float))
    k, n = traces.shape
    labels = labels or [f"L{i}" for i in range(k)]
    left, right, top, bottom = 70, 16, 36, 42
    height = top + bottom + row_height * k
    plot_w = width - left - right
    amp = np.abs(traces).max() or 1.0

    stride = max(1, int(np.ceil(n / max_points)))
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    xs = left + plot_w * idx / max(n - 1, 1)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>']
    for r in range(k):
        mid = top + row_height * (r + 0.5)
        ys = mid - (row_height * 0.45) * traces[r, idx] / amp
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        colour = _COLOURS[r % len(_COLOURS)]
        out.append(f'<line x1="{left}" y1="{_fmt(mid)}" x2="{width - right}" y2="{_fmt(mid)}" '
                   f'stroke="#dddddd" stroke-width="0.5"/>')
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1" points="{pts}"/>')
        out.append(f'<text x="{left - 6}" y="{_fmt(mid + 4)}" text-anchor="end">'
                   f'{escape(str(labels[r]))}</text>')
    y_axis = top + row_height * k
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{y_axis}" stroke="black"/>')
    out.append(f'<line x1="{left}" y1="{y_axis}" x2="{width - right}" y2="{y_axis}" stroke="black"/>')
    for t in _nice_ticks(0, n - 1):
        x = left + plot_w * t / max(n - 1, 1)
        out.append(f'<line x1="{_fmt(x)}" y1="{y_axis}" x2="{_fmt(x)}" y2="{y_axis + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{y_axis + 16}" text-anchor="middle">{int(round(t))}</text>')
    out.append(f'<text x="{left + plot_w / 2}" y="{height - 8}" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, svg):
    path = Path(path)
    path.write_text(svg)
    return path
