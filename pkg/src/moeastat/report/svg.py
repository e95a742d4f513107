"""Static SVG figures with embedded styling and no plotting dependency."""

from __future__ import annotations

from typing import List, Mapping, Optional, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
MARKERS = ("circle", "square", "triangle", "diamond", "cross")

WIDTH, HEIGHT = 520, 440
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 60, 150, 40, 50

STYLE = (
    "text{font-family:Helvetica,Arial,sans-serif;font-size:12px;fill:#222}"
    ".axis{stroke:#222;stroke-width:1;fill:none}"
    ".grid{stroke:#ddd;stroke-width:0.5}"
    ".discriminant{stroke:#000;stroke-width:1.5;stroke-dasharray:6,4;fill:none}"
    ".title{font-size:14px;font-weight:bold}"
)


def fmt(x: float) -> str:
    """Four significant digits, no trailing noise."""
    text = f"{float(x):.4g}"
    return "0" if text == "-0" else text


def _doc(width: int, height: int, body: List[str], title: str = "") -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<style>{STYLE}</style>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#fff"/>',
    ]
    if title:
        head.append(f'<text class="title" x="{width / 2:g}" y="22" text-anchor="middle">{escape(title)}</text>')
    return "\n".join(head + body + ["</svg>", ""])


def _marker(kind: str, x: float, y: float, color: str, size: float = 3.5) -> str:
    if kind == "circle":
        return f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="{fmt(size)}" fill="{color}" fill-opacity="0.7"/>'
    if kind == "square":
        return (f'<rect x="{fmt(x - size)}" y="{fmt(y - size)}" width="{fmt(2 * size)}" '
                f'height="{fmt(2 * size)}" fill="{color}" fill-opacity="0.7"/>')
    if kind == "triangle":
        pts = [(x, y - size * 1.2), (x - size, y + size), (x + size, y + size)]
    elif kind == "diamond":
        pts = [(x, y - size * 1.3), (x + size, y), (x, y + size * 1.3), (x - size, y)]
    else:
        return (f'<path d="M{fmt(x - size)},{fmt(y - size)}L{fmt(x + size)},{fmt(y + size)}'
                f'M{fmt(x - size)},{fmt(y + size)}L{fmt(x + size)},{fmt(y - size)}" '
                f'stroke="{color}" stroke-width="1.5"/>')
    return f'<polygon points="{" ".join(f"{fmt(a)},{fmt(b)}" for a, b in pts)}" fill="{color}" fill-opacity="0.7"/>'


def _style(i: int) -> Tuple[str, str]:
    return PALETTE[i % len(PALETTE)], MARKERS[i % len(MARKERS)]


def _legend(names: Sequence[str], x0: float, y0: float, line: bool = False) -> List[str]:
    out = ['<g class="legend">']
    for i, name in enumerate(names):
        color, kind = _style(i)
        y = y0 + 18 * i
        glyph = (f'<line x1="{fmt(x0)}" y1="{fmt(y)}" x2="{fmt(x0 + 14)}" y2="{fmt(y)}" stroke="{color}" stroke-width="2"/>'
                 if line else _marker(kind, x0 + 7, y, color))
        out.append(f'<g class="legend-entry" data-label={quoteattr(name)}>{glyph}'
                   f'<text x="{fmt(x0 + 20)}" y="{fmt(y + 4)}">{escape(name)}</text></g>')
    out.append("</g>")
    return out


class _Frame:
    """Maps data coordinates onto the plotting rectangle."""

    def __init__(self, xlim, ylim, width=WIDTH, height=HEIGHT):
        self.xlim, self.ylim = xlim, ylim
        self.left, self.right = MARGIN_LEFT, width - MARGIN_RIGHT
        self.top, self.bottom = MARGIN_TOP, height - MARGIN_BOTTOM

    def x(self, v):
        lo, hi = self.xlim
        return self.left + (v - lo) / (hi - lo) * (self.right - self.left)

    def y(self, v):
        lo, hi = self.ylim
        return self.bottom - (v - lo) / (hi - lo) * (self.bottom - self.top)

    def axes(self, xlabel: str, ylabel: str, xticks, yticks) -> List[str]:
        out = [f'<rect class="axis" x="{self.left}" y="{self.top}" width="{self.right - self.left}" '
               f'height="{self.bottom - self.top}"/>']
        for t in xticks:
            out.append(f'<line class="grid" x1="{fmt(self.x(t))}" y1="{self.top}" x2="{fmt(self.x(t))}" y2="{self.bottom}"/>')
            out.append(f'<text x="{fmt(self.x(t))}" y="{self.bottom + 16}" text-anchor="middle">{fmt(t)}</text>')
        for t in yticks:
            out.append(f'<line class="grid" x1="{self.left}" y1="{fmt(self.y(t))}" x2="{self.right}" y2="{fmt(self.y(t))}"/>')
            out.append(f'<text x="{self.left - 6}" y="{fmt(self.y(t) + 4)}" text-anchor="end">{fmt(t)}</text>')
        mid_x = (self.left + self.right) / 2
        mid_y = (self.top + self.bottom) / 2
        out.append(f'<text x="{fmt(mid_x)}" y="{self.bottom + 36}" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="16" y="{fmt(mid_y)}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {fmt(mid_y)})">{escape(ylabel)}</text>')
        return out


def _clip_line(center: np.ndarray, direction: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Segment of ``center + t * direction`` inside the unit square."""
    t_lo, t_hi = -np.inf, np.inf
    for c, d in zip(center, direction):
        if abs(d) < 1e-15:
            if not 0 <= c <= 1:
                return None
            continue
        a, b = (0 - c) / d, (1 - c) / d
        t_lo, t_hi = max(t_lo, min(a, b)), min(t_hi, max(a, b))
    if t_lo > t_hi:
        return None
    return center + t_lo * direction, center + t_hi * direction


def render_scatter(clouds: Mapping[str, Sequence[Sequence[float]]], weights: Sequence[float],
                   labels: Tuple[str, str] = ("HV", "1 - D2"), title: str = "") -> str:
    """Scatter of 2-D performance points on the unit square.

    The discriminant direction ``weights`` is drawn as a dashed line through
    the mean of all points.
    """
    frame = _Frame((0.0, 1.0), (0.0, 1.0))
    ticks = [0.0, 0.25, 0.5, 0.75, 1.0]
    body = frame.axes(labels[0], labels[1], ticks, ticks)
    names = list(clouds)
    all_pts = []
    for i, name in enumerate(names):
        color, kind = _style(i)
        pts = np.atleast_2d(np.asarray(clouds[name], dtype=float))
        all_pts.append(pts)
        body.append(f'<g class="series" data-label={quoteattr(name)}>')
        body.extend(_marker(kind, frame.x(px), frame.y(py), color) for px, py in pts[:, :2])
        body.append("</g>")
    w = np.asarray(weights, dtype=float)[:2]
    if all_pts and np.linalg.norm(w) > 0:
        center = np.vstack(all_pts)[:, :2].mean(axis=0)
        seg = _clip_line(center, w / np.linalg.norm(w))
        if seg is not None:
            (x1, y1), (x2, y2) = seg
            body.append(f'<line class="discriminant" x1="{fmt(frame.x(x1))}" y1="{fmt(frame.y(y1))}" '
                        f'x2="{fmt(frame.x(x2))}" y2="{fmt(frame.y(y2))}" '
                        f'data-weights="{fmt(w[0])},{fmt(w[1])}"/>')
    body.extend(_legend(names, frame.right + 16, frame.top + 10))
    return _doc(WIDTH, HEIGHT, body, title)


def render_ld_histogram(ld_values: Mapping[str, Sequence[float]], bins: int = 12, title: str = "") -> str:
    """Per-algorithm frequency polygons of LD values on one shared axis."""
    names = list(ld_values)
    arrays = [np.asarray(ld_values[a], dtype=float).ravel() for a in names]
    pooled = np.concatenate(arrays) if arrays else np.zeros(1)
    lo, hi = float(pooled.min()), float(pooled.max())
    span = (lo, hi) if hi > lo else (lo - 0.5, hi + 0.5)
    edges = np.linspace(span[0], span[1], bins + 1)
    centers = (edges[:-1] + edges[1:]) / 2
    counts = [np.histogram(v, bins=edges)[0] for v in arrays]
    top = max([1] + [int(c.max()) for c in counts])
    frame = _Frame(span, (0.0, float(top)))
    yticks = sorted({0, top // 2, top})
    body = frame.axes("LD value", "count", [span[0], span[1]], yticks)
    body.append(f'<g class="plot" data-xmin="{fmt(span[0])}" data-xmax="{fmt(span[1])}">')
    for i, (name, c) in enumerate(zip(names, counts)):
        color, _ = _style(i)
        pts = [(span[0], 0.0)] + list(zip(centers, c)) + [(span[1], 0.0)]
        path = " ".join(f"{fmt(frame.x(x))},{fmt(frame.y(y))}" for x, y in pts)
        body.append(f'<polyline class="series" data-label={quoteattr(name)} points="{path}" '
                    f'fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="1.5"/>')
    body.append("</g>")
    body.extend(_legend(names, frame.right + 16, frame.top + 10, line=True))
    return _doc(WIDTH, HEIGHT, body, title)


def _rank_color(value: float, lo: float, hi: float) -> str:
    # light yellow (best) to dark blue (worst) on a fixed rank scale
    t = 0.0 if hi <= lo else min(1.0, max(0.0, (value - lo) / (hi - lo)))
    start, end = (255, 247, 188), (37, 52, 148)
    r, g, b = (round(s + (e - s) * t) for s, e in zip(start, end))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap(mean_ranks: Mapping[int, Mapping[str, float]], algorithms: Optional[Sequence[str]] = None,
                   title: str = "") -> str:
    """Grid of mean ranks: one row per number of objectives, one column per algorithm."""
    ks = sorted(mean_ranks, key=int)
    if algorithms is None:
        algorithms = list(dict.fromkeys(a for k in ks for a in mean_ranks[k]))
    m = len(algorithms)
    cell_w, cell_h = 90, 34
    left, top = 70, 110
    width = left + cell_w * max(m, 1) + 20
    height = top + cell_h * max(len(ks), 1) + 20
    body = []
    for j, a in enumerate(algorithms):
        x = left + cell_w * (j + 0.5)
        body.append(f'<text x="{fmt(x)}" y="{top - 8}" text-anchor="start" '
                    f'transform="rotate(-35 {fmt(x)} {top - 8})">{escape(a)}</text>')
    for i, k in enumerate(ks):
        y = top + cell_h * i
        body.append(f'<text x="{left - 8}" y="{fmt(y + cell_h / 2 + 4)}" text-anchor="end">{k}D</text>')
        for j, a in enumerate(algorithms):
            v = float(mean_ranks[k][a])
            x = left + cell_w * j
            body.append(f'<rect class="cell" x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                        f'fill="{_rank_color(v, 1.0, float(max(m, 1)))}" stroke="#fff" '
                        f'data-k="{k}" data-label={quoteattr(a)}/>')
            text_fill = "#fff" if v > (1 + m) / 2 else "#222"
            body.append(f'<text class="value" x="{fmt(x + cell_w / 2)}" y="{fmt(y + cell_h / 2 + 4)}" '
                        f'text-anchor="middle" style="fill:{text_fill}">{v:.2f}</text>')
    return _doc(width, height, body, title)
