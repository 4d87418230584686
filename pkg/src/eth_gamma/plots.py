"""Minimal standalone SVG rendering for the four summary figures.

Every drawn data point keeps its data-space coordinates in ``data-x`` /
``data-y`` attributes so the figures can be checked structurally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not hi > lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else round(t, 12))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    width: int = 640
    height: int = 440
    margin: tuple = (60, 20, 40, 70)  # top, right, bottom-extra, left
    _items: list = field(default_factory=list)
    _xs: list = field(default_factory=list)
    _ys: list = field(default_factory=list)
    _legend: list = field(default_factory=list)

    def scatter(self, x, y, color=PALETTE[0], r=2.5, label=None, cls="marker"):
        x, y = np.asarray(x, float), np.asarray(y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        self._items.append(("scatter", x[ok], y[ok], color, r, cls))
        self._track(x[ok], y[ok], label, color)

    def line(self, x, y, color=PALETTE[0], label=None, cls="series", dash=None):
        x, y = np.asarray(x, float), np.asarray(y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        self._items.append(("line", x[ok], y[ok], color, dash, cls))
        self._track(x[ok], y[ok], label, color)

    def hline(self, y, color="#555555", label=None, cls="reference"):
        self._items.append(("hline", float(y), color, cls))
        self._ys.append(np.array([y]))
        if label:
            self._legend.append((label, color))

    def span(self, x0, x1, color="#cccccc", cls="fit-window"):
        self._items.append(("span", float(x0), float(x1), color, cls))

    def _track(self, x, y, label, color):
        self._xs.append(x)
        self._ys.append(y)
        if label:
            self._legend.append((label, color))

    def _limits(self, arrays):
        vals = np.concatenate([a for a in arrays if len(a)]) if any(len(a) for a in arrays) else np.array([0.0, 1.0])
        lo, hi = float(vals.min()), float(vals.max())
        pad = 0.05 * (hi - lo) if hi > lo else 0.5
        return lo - pad, hi + pad

    def render(self) -> str:
        top, right, bottom, left = self.margin
        pw, ph = self.width - left - right, self.height - top - bottom - 30
        x0, x1 = self._limits(self._xs)
        y0, y1 = self._limits(self._ys)

        def px(v):
            return left + (v - x0) / (x1 - x0) * pw

        def py(v):
            return top + (y1 - v) / (y1 - y0) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif" font-size="12">',
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
            f'<text x="{self.width / 2}" y="24" text-anchor="middle" font-size="15">{escape(self.title)}</text>',
        ]
        for item in self._items:
            if item[0] == "span":
                _, a, b, color, cls = item
                a, b = max(a, x0), min(b, x1)
                out.append(f'<rect class="{cls}" x="{px(a):.2f}" y="{top}" width="{max(px(b) - px(a), 0):.2f}" '
                           f'height="{ph}" fill="{color}" fill-opacity="0.35" data-x0="{_fmt(a)}" data-x1="{_fmt(b)}"/>')
        out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
        for t in nice_ticks(x0, x1):
            if x0 <= t <= x1:
                out.append(f'<line class="tick" x1="{px(t):.2f}" x2="{px(t):.2f}" y1="{top + ph}" y2="{top + ph + 5}" stroke="black"/>')
                out.append(f'<text x="{px(t):.2f}" y="{top + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
        for t in nice_ticks(y0, y1):
            if y0 <= t <= y1:
                out.append(f'<line class="tick" x1="{left - 5}" x2="{left}" y1="{py(t):.2f}" y2="{py(t):.2f}" stroke="black"/>')
                out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
        out.append(f'<text x="{left + pw / 2}" y="{top + ph + 38}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text transform="translate({18},{top + ph / 2}) rotate(-90)" text-anchor="middle">{escape(self.ylabel)}</text>')

        for item in self._items:
            kind = item[0]
            if kind == "line":
                _, x, y, color, dash, cls = item
                pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
                style = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{style}/>')
            elif kind == "scatter":
                _, x, y, color, r, cls = item
                for a, b in zip(x, y):
                    out.append(f'<circle class="{cls}" cx="{px(a):.2f}" cy="{py(b):.2f}" r="{r}" fill="{color}" '
                               f'data-x="{_fmt(a)}" data-y="{_fmt(b)}"/>')
            elif kind == "hline":
                _, y, color, cls = item
                out.append(f'<line class="{cls}" x1="{left}" x2="{left + pw}" y1="{py(y):.2f}" y2="{py(y):.2f}" '
                           f'stroke="{color}" stroke-dasharray="6,4" data-y="{_fmt(y)}"/>')
        for k, (label, color) in enumerate(self._legend):
            yy = top + 14 + 16 * k
            out.append(f'<rect x="{left + pw - 150}" y="{yy - 9}" width="10" height="10" fill="{color}"/>')
            out.append(f'<text x="{left + pw - 135}" y="{yy}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def spectrum_figure(index, energy, model: str) -> Figure:
    fig = Figure(f"{model.upper()} spectrum", "n", "E_n")
    fig.scatter(index, energy, r=1.2)
    return fig


def entropy_figure(beta, entropy, model: str) -> Figure:
    fig = Figure(f"{model.upper()} canonical entropy", "beta_eff", "S")
    fig.line(beta, entropy)
    return fig


def fomega_figure(curves, fits, model: str) -> Figure:
    """``curves``: list of (beta, omega, neg_log_f); ``fits``: matching
    (gamma, intercept, omega_lo, omega_hi) or None."""
    fig = Figure(f"{model.upper()} -ln f(omega)", "omega", "-ln f")
    for k, ((beta, w, y), fit) in enumerate(zip(curves, fits)):
        color = PALETTE[k % len(PALETTE)]
        if fit is not None:
            gamma, c, lo, hi = fit
            fig.span(lo, hi)
            grid = np.array([lo, hi])
            fig.line(grid, c + gamma * grid, color=color, cls="fit", dash="4,3")
        fig.scatter(w, y, color=color, label=f"beta_eff={_fmt(beta)}")
    return fig


def gamma_figure(beta, ratio, model: str) -> Figure:
    fig = Figure(f"{model.upper()} gamma / beta_eff", "beta_eff", "gamma / beta_eff")
    fig.hline(0.25, label="bound 1/4")
    fig.scatter(beta, ratio, r=4)
    return fig
