"""Deterministic SVG line plots of trajectory CSV files.

One polyline per component column (``P_i`` or ``L_i``) with one vertex per
CSV row, plus an optional step line for the ``delta`` column on its own
scale.  No timestamps or random ids, so identical input gives identical bytes.
"""

from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 500
MARGIN = 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


class PlotInputError(ValueError):
    pass


def read_columns(text: str) -> tuple[list[float], dict[str, list[float]], list[float | None]]:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise PlotInputError("CSV has no data rows")
    head = [h.strip() for h in rows[0]]
    if not head or head[0] != "q":
        raise PlotInputError("first column must be 'q'")
    comp = [i for i, h in enumerate(head) if h.startswith(("P_", "L_"))]
    if not comp:
        raise PlotInputError("no component columns (P_i or L_i)")
    di = head.index("delta") if "delta" in head else None
    q, series, delta = [], {head[i]: [] for i in comp}, []
    for ln, r in enumerate(rows[1:], start=2):
        if len(r) != len(head):
            raise PlotInputError(f"line {ln}: expected {len(head)} fields, got {len(r)}")
        try:
            q.append(float(r[0]))
            for i in comp:
                series[head[i]].append(float(r[i]))
            if di is not None:
                delta.append(float(r[di]) if r[di].strip() else None)
        except ValueError as exc:
            raise PlotInputError(f"line {ln}: {exc}") from exc
    return q, series, delta


def _scale(lo: float, hi: float, a: float, b: float):
    span = hi - lo or 1.0
    return lambda v: a + (v - lo) * (b - a) / span


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _log10(name: str, vs: list[float]) -> list[float]:
    if any(v <= 0 for v in vs):
        raise PlotInputError(f"log scale needs positive values in column {name}")
    return [math.log10(v) for v in vs]


def render_svg(text: str, show_delta: bool = False, title: str = "", log: bool = False) -> str:
    """SVG line plot; ``log=True`` plots log10 of q and of every component."""
    q, series, delta = read_columns(text)
    if log:
        q = _log10("q", q)
        series = {k: _log10(k, v) for k, v in series.items()}
    values = [v for s in series.values() for v in s]
    sx = _scale(min(q), max(q), MARGIN, WIDTH - MARGIN)
    sy = _scale(min(values), max(values), HEIGHT - MARGIN, MARGIN)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 20}" font-size="12">{min(q):.4g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 20}" font-size="12" text-anchor="end">{max(q):.4g}</text>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="{MARGIN - 20}" font-size="14" text-anchor="middle">{escape(title)}</text>')
    for k, (name, ys) in enumerate(series.items()):
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(q, ys))
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline class="component" data-name="{name}" fill="none" stroke="{color}" points="{pts}"/>')
    if show_delta and delta and any(d is not None for d in delta):
        ds = [d for d in delta if d is not None]
        sd = _scale(0.0, max(ds) or 1.0, HEIGHT - MARGIN, MARGIN)
        steps = []
        for i in range(len(q) - 1):
            if delta[i] is None:
                continue
            steps.append(f"{_fmt(sx(q[i]))},{_fmt(sd(delta[i]))}")
            steps.append(f"{_fmt(sx(q[i + 1]))},{_fmt(sd(delta[i]))}")
        out.append(
            f'<polyline class="delta" fill="none" stroke="gray" stroke-dasharray="4 3" points="{" ".join(steps)}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = ["PlotInputError", "read_columns", "render_svg"]
