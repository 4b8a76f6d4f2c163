"""Static SVG figures, hand-rolled (no plotting dependency).

Figures are verification artifacts: line plots of observables against
pulse duration, a log10 kinetic-energy heatmap over the (P, sigma) plane,
and polar angular-density plots of a wavepacket.
"""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .core import Wavepacket
from .sweep import SweepResult

W, H = 640, 440
MARGIN = 56
PALETTE = ["#1f77b4", "#d62728", "#e8b90c", "#2ca02c", "#9467bd", "#8c564b"]


class PlotKind(Enum):
    ENERGY_VS_SIGMA = "energy_vs_sigma"
    COEFFS_VS_SIGMA = "coeffs_vs_sigma"
    ORIENTATION = "orientation"
    ALIGNMENT = "alignment"
    SURFACE_HEATMAP = "surface_heatmap"
    POLAR_DENSITY = "polar_density"


class MissingSeriesError(ValueError):
    """The result does not contain the series needed for the requested plot."""


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    t0 = math.ceil(lo / step) * step
    out = []
    t = t0
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


class _Canvas:
    def __init__(self, xlim, ylim, title, xlabel, ylabel):
        self.xlim, self.ylim = xlim, ylim
        title, xlabel, ylabel = escape(title), escape(xlabel), escape(ylabel)
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
            f'<rect width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
            f'<text x="{W / 2}" y="{H - 8}" text-anchor="middle">{xlabel}</text>',
            f'<text x="14" y="{H / 2}" text-anchor="middle" '
            f'transform="rotate(-90 14 {H / 2})">{ylabel}</text>',
            f'<rect x="{MARGIN}" y="{MARGIN - 16}" width="{W - 2 * MARGIN}" '
            f'height="{H - 2 * MARGIN}" fill="none" stroke="black"/>',
        ]
        for t in _ticks(*xlim):
            x = self.px(t)
            self.parts.append(f'<line x1="{x:.1f}" y1="{H - MARGIN - 16}" x2="{x:.1f}" '
                              f'y2="{H - MARGIN - 11}" stroke="black"/>')
            self.parts.append(f'<text x="{x:.1f}" y="{H - MARGIN + 4}" '
                              f'text-anchor="middle">{t:g}</text>')
        for t in _ticks(*ylim):
            y = self.py(t)
            self.parts.append(f'<line x1="{MARGIN - 5}" y1="{y:.1f}" x2="{MARGIN}" '
                              f'y2="{y:.1f}" stroke="black"/>')
            self.parts.append(f'<text x="{MARGIN - 8}" y="{y + 4:.1f}" '
                              f'text-anchor="end">{t:g}</text>')

    def px(self, x: float) -> float:
        lo, hi = self.xlim
        return MARGIN + (x - lo) / (hi - lo) * (W - 2 * MARGIN)

    def py(self, y: float) -> float:
        lo, hi = self.ylim
        return (H - MARGIN - 16) - (y - lo) / (hi - lo) * (H - 2 * MARGIN)

    def polyline(self, xs, ys, color, label=None, idx=0):
        pts = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                          'stroke-width="1.3"/>')
        if label:
            y = MARGIN + 2 + 14 * idx
            self.parts.append(f'<line x1="{W - MARGIN - 90}" y1="{y}" x2="{W - MARGIN - 70}" '
                              f'y2="{y}" stroke="{color}" stroke-width="2"/>')
            self.parts.append(f'<text x="{W - MARGIN - 64}" y="{y + 4}">{escape(label)}</text>')

    def svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _line_figure(result: SweepResult, series: str, title: str, ylabel: str) -> str:
    if len(result.grid.sigma_values) < 2:
        raise MissingSeriesError(f"{series} plot needs a sigma series with >= 2 points")
    sigmas = np.asarray(result.grid.sigma_values)
    n_sig = sigmas.size
    curves = []
    for ip, p in enumerate(result.grid.p_values):
        recs = result.records[ip * n_sig:(ip + 1) * n_sig]
        ys = np.array([getattr(r, series) for r in recs])
        curves.append((f"P={p:g}", sigmas, ys))
    ymin = min(float(np.nanmin(c[2])) for c in curves)
    ymax = max(float(np.nanmax(c[2])) for c in curves)
    pad = 0.05 * (ymax - ymin or 1.0)
    cv = _Canvas((float(sigmas[0]), float(sigmas[-1])), (ymin - pad, ymax + pad),
                 title, "pulse duration sigma", ylabel)
    for i, (label, xs, ys) in enumerate(curves):
        cv.polyline(xs, ys, PALETTE[i % len(PALETTE)],
                    label if len(curves) > 1 else None, i)
    return cv.svg()


def _coeffs_figure(result: SweepResult, n_coeffs: int = 3) -> str:
    if len(result.grid.p_values) != 1:
        raise MissingSeriesError("coefficient plot needs a single-P sweep")
    sigmas = np.asarray(result.grid.sigma_values)
    if sigmas.size < 2:
        raise MissingSeriesError("coefficient plot needs a sigma series with >= 2 points")
    cv = _Canvas((float(sigmas[0]), float(sigmas[-1])), (0.0, 1.05),
                 f"|C_J| vs sigma (P={result.grid.p_values[0]:g}, J0={result.grid.j0})",
                 "pulse duration sigma", "|C_J|")
    for j in range(n_coeffs):
        ys = np.array([r.coeff_abs[j] if j < r.coeff_abs.size else 0.0
                       for r in result.records])
        cv.polyline(sigmas, ys, PALETTE[j % len(PALETTE)], f"|C_{j}|", j)
    return cv.svg()


def _heat_color(v: float) -> str:
    """Map [0, 1] through a dark-blue -> yellow ramp."""
    v = min(1.0, max(0.0, v))
    r = int(255 * min(1.0, 2 * v))
    g = int(255 * v)
    b = int(255 * max(0.0, 1.0 - 1.5 * v))
    return f"#{r:02x}{g:02x}{b:02x}"


def _heatmap_figure(result: SweepResult) -> str:
    if len(result.grid.p_values) < 2 or len(result.grid.sigma_values) < 2:
        raise MissingSeriesError("surface heatmap needs a 2-D (P, sigma) grid")
    e = result.energy_surface()
    loge = np.log10(np.maximum(e, 1e-16))
    lo, hi = float(loge.min()), float(loge.max())
    ps = np.asarray(result.grid.p_values)
    sigmas = np.asarray(result.grid.sigma_values)
    cv = _Canvas((float(sigmas[0]), float(sigmas[-1])), (float(ps[0]), float(ps[-1])),
                 f"log10 kinetic energy over (P, sigma), J0={result.grid.j0}",
                 "pulse duration sigma", "pulse strength P")
    dw = (W - 2 * MARGIN) / sigmas.size
    dh = (H - 2 * MARGIN) / ps.size
    for ip in range(ps.size):
        for isig in range(sigmas.size):
            v = (loge[ip, isig] - lo) / (hi - lo or 1.0)
            x = MARGIN + isig * dw
            y = (H - MARGIN - 16) - (ip + 1) * dh
            cv.parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{dw + 0.5:.2f}" '
                            f'height="{dh + 0.5:.2f}" fill="{_heat_color(v)}"/>')
    return cv.svg()


def angular_density(psi: Wavepacket, n_theta: int = 361) -> tuple[np.ndarray, np.ndarray]:
    """|sum_J C_J Y_J0(theta)|^2 on a uniform theta grid over [0, pi]."""
    theta = np.linspace(0.0, math.pi, n_theta)
    x = np.cos(theta)
    amp = np.zeros_like(theta, dtype=np.complex128)
    for j in range(psi.basis.dim):
        leg = np.polynomial.legendre.Legendre.basis(j)(x)
        amp += psi.coefficients[j] * math.sqrt((2 * j + 1) / (4 * math.pi)) * leg
    return theta, np.abs(amp) ** 2


def _polar_figure(psi: Wavepacket, title: str) -> str:
    theta, dens = angular_density(psi)
    r = dens / dens.max() if dens.max() > 0 else dens
    cx, cy, scale = W / 2, H / 2, (H - 2 * MARGIN) / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{cx}" y1="{MARGIN}" x2="{cx}" y2="{H - MARGIN}" '
        'stroke="#999" stroke-dasharray="4 3"/>',
    ]
    # field axis vertical: x = r sin(theta), y = -r cos(theta); mirror for phi symmetry
    for sign in (1, -1):
        pts = " ".join(
            f"{cx + sign * scale * ri * math.sin(t):.2f},{cy - scale * ri * math.cos(t):.2f}"
            for t, ri in zip(theta, r))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[0]}" '
                     'stroke-width="1.5"/>')
    return "\n".join(parts + ["</svg>"]) + "\n"


def emit_plot(result: SweepResult | None, kind: PlotKind, outpath: str | Path,
              psi: Wavepacket | None = None) -> Path:
    """Render one figure kind to a self-contained SVG file.

    POLAR_DENSITY takes a Wavepacket; all other kinds take a SweepResult.
    Raises MissingSeriesError when the needed series is absent.
    """
    if kind is PlotKind.POLAR_DENSITY:
        if psi is None:
            raise MissingSeriesError("polar density plot needs a wavepacket")
        svg = _polar_figure(psi, f"angular density (J0={psi.j0})")
    else:
        if result is None or not result.records:
            raise MissingSeriesError(f"{kind.value} plot needs a non-empty sweep result")
        if kind is PlotKind.ENERGY_VS_SIGMA:
            svg = _line_figure(result, "energy",
                               f"kinetic energy vs sigma (J0={result.grid.j0})",
                               "kinetic energy / B")
        elif kind is PlotKind.ORIENTATION:
            svg = _line_figure(result, "orientation",
                               f"orientation vs sigma (J0={result.grid.j0})", "<cos theta>")
        elif kind is PlotKind.ALIGNMENT:
            svg = _line_figure(result, "alignment",
                               f"alignment vs sigma (J0={result.grid.j0})", "<cos^2 theta>")
        elif kind is PlotKind.COEFFS_VS_SIGMA:
            svg = _coeffs_figure(result)
        elif kind is PlotKind.SURFACE_HEATMAP:
            svg = _heatmap_figure(result)
        else:  # pragma: no cover
            raise ValueError(f"unknown plot kind {kind}")
    outpath = Path(outpath)
    outpath.parent.mkdir(parents=True, exist_ok=True)
    outpath.write_text(svg)
    return outpath
