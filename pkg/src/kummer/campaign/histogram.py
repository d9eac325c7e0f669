"""Histogram of r(q) over a scan, with a fitted normal overlay and SVG output."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .records import iter_scan

DEFAULT_BINS = 200
DEFAULT_RANGE = (-0.6, 0.6)

# predicate on the flag tuple (2q+1, 2q-1, 4q+1, 4q-1)
FILTERS: dict[str, Callable[[tuple[bool, bool, bool, bool]], bool]] = {
    "all": lambda f: True,
    "exclude-2q±1-prime": lambda f: not (f[0] or f[1]),
    "exclude-2q±1-and-4q±1-prime": lambda f: not any(f),
    "only-2q±1-prime": lambda f: f[0] or f[1],
    "only-4q±1-prime": lambda f: f[2] or f[3],
    "only-2q+1-prime": lambda f: f[0] and not (f[1] or f[2] or f[3]),
    "only-2q-1-prime": lambda f: f[1] and not (f[0] or f[2] or f[3]),
}
# ASCII spellings accepted on the command line
_ALIASES = {name.replace("±", "pm"): name for name in FILTERS if "±" in name}


def resolve_filter(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in FILTERS:
        raise ValueError(f"unknown filter {name!r}; choose from {sorted(FILTERS)}")
    return name


class EmptySelectionError(ValueError):
    """No scan rows survive the filter."""


@dataclass(frozen=True)
class HistogramSpec:
    bins: int = DEFAULT_BINS
    lo: float = DEFAULT_RANGE[0]
    hi: float = DEFAULT_RANGE[1]
    filter: str = "all"
    overlay: bool = True

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        object.__setattr__(self, "filter", resolve_filter(self.filter))


def normal_pdf(x, mu: float, sigma: float):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-((x - mu) ** 2) / (2 * sigma * sigma)) / (sigma * math.sqrt(2 * math.pi))


@dataclass
class HistogramResult:
    spec: HistogramSpec
    edges: np.ndarray
    counts: np.ndarray
    n: int
    n_outside: int
    mu: float
    sigma: float
    overlay: Optional[np.ndarray]

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    @property
    def width(self) -> float:
        return (self.spec.hi - self.spec.lo) / self.spec.bins

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.n * self.width)

    def peak_center(self) -> float:
        return float(self.centers[int(np.argmax(self.counts))])

    def data_text(self) -> str:
        lines = [f"# n={self.n} outside={self.n_outside} mu={self.mu:.12g} sigma={self.sigma:.12g} filter={self.spec.filter}"]
        lines.append("lo,hi,center,count,density,normal")
        normal = self.overlay if self.overlay is not None else [math.nan] * self.spec.bins
        for i in range(self.spec.bins):
            lines.append(
                f"{self.edges[i]:.10g},{self.edges[i + 1]:.10g},{self.centers[i]:.10g},"
                f"{int(self.counts[i])},{self.density[i]:.10g},{normal[i]:.10g}"
            )
        return "\n".join(lines) + "\n"


def histogram_values(values, spec: HistogramSpec) -> HistogramResult:
    r = np.asarray(values, dtype=np.float64)
    if r.size == 0:
        raise EmptySelectionError(f"no rows pass filter {spec.filter!r}")
    edges = np.linspace(spec.lo, spec.hi, spec.bins + 1)
    inside = (r >= spec.lo) & (r <= spec.hi)
    counts, _ = np.histogram(r[inside], bins=edges)
    mu = math.fsum(r.tolist()) / r.size
    sigma = math.sqrt(math.fsum(((r - mu) ** 2).tolist()) / r.size)
    overlay = None
    if spec.overlay and sigma > 0:
        overlay = normal_pdf((edges[:-1] + edges[1:]) / 2, mu, sigma)
    return HistogramResult(spec, edges, counts, int(r.size), int(r.size - inside.sum()), mu, sigma, overlay)


def select_r(csv_path, filter_name: str = "all") -> np.ndarray:
    pred = FILTERS[resolve_filter(filter_name)]
    return np.array([rec.r for rec in iter_scan(csv_path) if pred(rec.flags)], dtype=np.float64)


def histogram(csv_path, spec: HistogramSpec, svg_path=None, data_path=None) -> HistogramResult:
    """Bin r(q) of a scan; optionally write the SVG and the bins data file."""
    res = histogram_values(select_r(csv_path, spec.filter), spec)
    if svg_path is not None:
        Path(svg_path).write_text(render_svg(res), encoding="utf-8")
    if data_path is not None:
        Path(data_path).write_text(res.data_text(), encoding="utf-8")
    return res


def _f(x: float) -> str:
    return f"{x:.2f}"


def render_svg(res: HistogramResult, width: int = 800, height: int = 500) -> str:
    """Static SVG 1.1; bytes depend only on the histogram result."""
    spec = res.spec
    left, right, top, bottom = 60, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom
    dens = res.density
    ymax = float(dens.max())
    if res.overlay is not None:
        ymax = max(ymax, float(res.overlay.max()))
    ymax = ymax * 1.05 if ymax > 0 else 1.0

    def sx(x):
        return left + (x - spec.lo) / (spec.hi - spec.lo) * pw

    def sy(y):
        return top + ph - y / ymax * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">'
        f"r(q), filter {spec.filter}, n={res.n}, mu={res.mu:.5f}, sigma={res.sigma:.5f}</text>",
        '<g fill="#4a7ab5" stroke="none">',
    ]
    bw = pw / spec.bins
    for i, d in enumerate(dens):
        if d <= 0:
            continue
        y = sy(d)
        out.append(f'<rect x="{_f(left + i * bw)}" y="{_f(y)}" width="{_f(bw)}" height="{_f(top + ph - y)}"/>')
    out.append("</g>")
    if res.overlay is not None:
        pts = " ".join(f"{_f(sx(c))},{_f(sy(v))}" for c, v in zip(res.centers, res.overlay))
        out.append(f'<polyline fill="none" stroke="#c0392b" stroke-width="1.5" points="{pts}"/>')
    out.append(
        f'<path d="M{left},{top} V{top + ph} H{left + pw}" fill="none" stroke="black" stroke-width="1"/>'
    )
    for k in range(5):
        x = spec.lo + k * (spec.hi - spec.lo) / 4
        out.append(
            f'<text x="{_f(sx(x))}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{x:.3g}</text>'
        )
    for k in range(5):
        y = k * ymax / 4
        out.append(
            f'<text x="{left - 6}" y="{_f(sy(y) + 4)}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{y:.3g}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
