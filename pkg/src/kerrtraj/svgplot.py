"""Minimal deterministic SVG output: line plots and heat maps.

Hand-rolled on purpose: no plotting dependency, and byte-identical files
for identical inputs (coordinates are formatted with fixed precision).
"""

import numpy as np

__all__ = ["line_plot_svg", "heatmap_svg"]

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 56, 16, 28, 42
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _f(v) -> str:
    return format(float(v), ".2f")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return raw


def _axes(width, height, x_lo, x_hi, y_lo, y_hi, x_label, y_label, title):
    iw = width - _MARGIN_L - _MARGIN_R
    ih = height - _MARGIN_T - _MARGIN_B

    def sx(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * iw

    def sy(y):
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * ih

    parts = [
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{iw}" height="{ih}" '
        'fill="none" stroke="#333" stroke-width="1"/>'
    ]
    for xv in _ticks(x_lo, x_hi):
        px = sx(xv)
        parts.append(
            f'<line x1="{_f(px)}" y1="{_MARGIN_T + ih}" x2="{_f(px)}" y2="{_MARGIN_T + ih + 4}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{_f(px)}" y="{_MARGIN_T + ih + 16}" font-size="10" text-anchor="middle">{xv:.3g}</text>'
        )
    for yv in _ticks(y_lo, y_hi):
        py = sy(yv)
        parts.append(f'<line x1="{_MARGIN_L - 4}" y1="{_f(py)}" x2="{_MARGIN_L}" y2="{_f(py)}" stroke="#333"/>')
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{_f(py + 3)}" font-size="10" text-anchor="end">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + iw / 2:.1f}" y="{height - 8}" font-size="11" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{_MARGIN_T + ih / 2:.1f}" font-size="11" text-anchor="middle" '
        f'transform="rotate(-90 14 {_MARGIN_T + ih / 2:.1f})">{y_label}</text>'
    )
    if title:
        parts.append(
            f'<text x="{_MARGIN_L + iw / 2:.1f}" y="18" font-size="12" text-anchor="middle">{title}</text>'
        )
    return parts, sx, sy


def line_plot_svg(series, path, x_label="t  (1/eta)", y_label="", title="", width=860, height=360):
    """Write a polyline plot; ``series`` is a list of (x, y, label) triples."""
    x_lo = min(float(np.min(x)) for x, _, _ in series)
    x_hi = max(float(np.max(x)) for x, _, _ in series)
    y_lo = min(float(np.min(y)) for _, y, _ in series)
    y_hi = max(float(np.max(y)) for _, y, _ in series)
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    parts, sx, sy = _axes(width, height, x_lo, x_hi, y_lo, y_hi, x_label, y_label, title)
    for k, (xs, ys, label) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>')
        if label:
            parts.append(
                f'<text x="{width - _MARGIN_R - 8}" y="{_MARGIN_T + 14 + 13 * k}" font-size="10" '
                f'text-anchor="end" fill="{color}">{label}</text>'
            )
    _write(path, width, height, parts)


def _diverging_color(v):
    # v in [-1, 1]: blue (negative) -> white -> red (positive)
    v = float(np.clip(v, -1.0, 1.0))
    if v >= 0:
        r, g, b = 255, round(255 * (1 - v)), round(255 * (1 - v))
    else:
        r, g, b = round(255 * (1 + v)), round(255 * (1 + v)), 255
    return f"rgb({r},{g},{b})"


def heatmap_svg(x_axis, p_axis, values, path, x_label="x", y_label="p", title="", width=640, height=620):
    """Color-mapped rectangles for a 2-D field values[i, j] at (x_axis[i], p_axis[j])."""
    values = np.asarray(values)
    v_max = float(np.max(np.abs(values))) or 1.0
    x_lo, x_hi = float(x_axis[0]), float(x_axis[-1])
    y_lo, y_hi = float(p_axis[0]), float(p_axis[-1])
    parts, sx, sy = _axes(width, height, x_lo, x_hi, y_lo, y_hi, x_label, y_label, title)
    dx = (x_axis[1] - x_axis[0]) if len(x_axis) > 1 else 1.0
    dp = (p_axis[1] - p_axis[0]) if len(p_axis) > 1 else 1.0
    cells = []
    for i, xv in enumerate(x_axis):
        px = sx(xv - 0.5 * dx)
        w = sx(xv + 0.5 * dx) - px
        for j, pv in enumerate(p_axis):
            py = sy(pv + 0.5 * dp)
            h = sy(pv - 0.5 * dp) - py
            color = _diverging_color(values[i, j] / v_max)
            cells.append(
                f'<rect x="{_f(px)}" y="{_f(py)}" width="{_f(w)}" height="{_f(h)}" fill="{color}"/>'
            )
    # cells under the frame
    _write(path, width, height, cells + parts)


def _write(path, width, height, parts):
    body = "\n".join(parts)
    doc = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n<rect width="{width}" height="{height}" fill="white"/>\n'
        f"{body}\n</svg>\n"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc)
