"""Deterministic standalone SVG charts (bar and scatter) on a fixed 960x540 canvas."""

from __future__ import annotations

import math
from html import escape
from pathlib import Path
from typing import Sequence

from .errors import EmptyInput, IoFailure

__all__ = ["WIDTH", "HEIGHT", "bar_chart_svg", "scatter_svg", "render_bar_chart", "render_scatter"]

WIDTH, HEIGHT = 960, 540
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 90, 30, 60, 110
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
BAR_FILL = "#4C72B0"
POINT_FILL = "#C44E52"


def _num(v: float) -> str:
    return f"{v:.2f}"


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.2f}" y="34.00" text-anchor="middle" font-family="sans-serif" '
        f'font-size="20">{escape(title)}</text>',
    ]


def _axes(x_label: str, y_label: str) -> list[str]:
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + PLOT_H
    cy = MARGIN_TOP + PLOT_H / 2
    return [
        f'<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="#000000" stroke-width="1"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + PLOT_W}" y2="{y0}" stroke="#000000" stroke-width="1"/>',
        f'<text x="{x0 + PLOT_W / 2:.2f}" y="{HEIGHT - 12}.00" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(x_label)}</text>',
        f'<text x="24.00" y="{cy:.2f}" text-anchor="middle" font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 24.00 {cy:.2f})">{escape(y_label)}</text>',
    ]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / n for i in range(n + 1)]


def _fmt_tick(v: float) -> str:
    if v != 0 and (abs(v) >= 1e5 or abs(v) < 1e-2):
        return f"{v:.2e}"
    return f"{v:.2f}"


def _check_finite(values):
    if not all(math.isfinite(v) for v in values):
        raise ValueError("chart values must be finite")


def bar_chart_svg(series: Sequence[tuple[str, float]], title: str, *, x_label: str = "",
                  y_label: str = "") -> str:
    """One bar per ``(label, value)`` in input order; heights scale linearly to the largest value."""
    if not series:
        raise EmptyInput("bar chart needs at least one item")
    values = [float(v) for _, v in series]
    _check_finite(values)
    if min(values) < 0:
        raise ValueError("bar chart values must be non-negative")
    top = max(values)
    scale = PLOT_H / top if top > 0 else 0.0
    slot = PLOT_W / len(series)
    bar_w = slot * 0.7
    base = MARGIN_TOP + PLOT_H

    out = _header(title) + _axes(x_label, y_label)
    for v in _ticks(0.0, top if top > 0 else 1.0):
        y = base - v * (scale if top > 0 else PLOT_H)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{_num(y)}" x2="{MARGIN_LEFT}" y2="{_num(y)}" '
                   f'stroke="#000000" stroke-width="1"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{_num(y + 4)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{_fmt_tick(v)}</text>')
    for i, (label, v) in enumerate(series):
        h = float(v) * scale
        x = MARGIN_LEFT + i * slot + (slot - bar_w) / 2
        cx = x + bar_w / 2
        out.append(f'<rect class="bar" x="{_num(x)}" y="{_num(base - h)}" width="{_num(bar_w)}" '
                   f'height="{_num(h)}" fill="{BAR_FILL}"><title>{escape(str(label))}: {float(v):.6f}</title></rect>')
        ly = base + 14
        out.append(f'<text x="{_num(cx)}" y="{_num(ly)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11" transform="rotate(-40 {_num(cx)} {_num(ly)})">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def scatter_svg(series: Sequence[tuple[float, float, str]], title: str, *, x_label: str = "",
                y_label: str = "") -> str:
    """Markers at linearly mapped ``(x, y)``; degenerate ranges are centred."""
    if not series:
        raise EmptyInput("scatter plot needs at least one point")
    xs = [float(p[0]) for p in series]
    ys = [float(p[1]) for p in series]
    _check_finite(xs + ys)

    def mapper(lo, hi, start, length, flip):
        if hi == lo:
            return lambda v: start + length / 2
        pad = (hi - lo) * 0.05
        lo, hi = lo - pad, hi + pad
        if flip:
            return lambda v: start + length - (v - lo) / (hi - lo) * length
        return lambda v: start + (v - lo) / (hi - lo) * length

    fx = mapper(min(xs), max(xs), MARGIN_LEFT, PLOT_W, False)
    fy = mapper(min(ys), max(ys), MARGIN_TOP, PLOT_H, True)

    out = _header(title) + _axes(x_label, y_label)
    base = MARGIN_TOP + PLOT_H
    for v in _ticks(min(xs), max(xs)) if max(xs) > min(xs) else [xs[0]]:
        out.append(f'<text x="{_num(fx(v))}" y="{_num(base + 18)}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_fmt_tick(v)}</text>')
    for v in _ticks(min(ys), max(ys)) if max(ys) > min(ys) else [ys[0]]:
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{_num(fy(v) + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_fmt_tick(v)}</text>')
    for x, y, label in series:
        px, py = fx(float(x)), fy(float(y))
        out.append(f'<circle class="point" cx="{_num(px)}" cy="{_num(py)}" r="5.00" fill="{POINT_FILL}">'
                   f'<title>{escape(str(label))}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(text: str, path) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def render_bar_chart(series, title: str, path, **labels) -> None:
    _write(bar_chart_svg(series, title, **labels), path)


def render_scatter(series, title: str, path, **labels) -> None:
    _write(scatter_svg(series, title, **labels), path)
