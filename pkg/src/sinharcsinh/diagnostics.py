"""Goodness-of-fit graphics data: simulation envelopes for QQ-plots and
histogram/density overlays."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import inference
from ._validation import check_sample

__all__ = ["QqEnvelope", "qq_envelope", "inside_fraction", "OverlayTable",
           "density_overlay", "envelope_svg", "DEFAULT_N_SIM"]

DEFAULT_N_SIM = 500


@dataclass
class QqEnvelope:
    """Simulated order statistics bounds at each sorted data value.

    The reference for a perfect fit is the identity line: point ``i`` is
    inside when ``env_lo[i] <= probe_quantiles[i] <= env_hi[i]``.
    """

    probe_quantiles: np.ndarray
    env_lo: np.ndarray
    env_hi: np.ndarray
    n_sim: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("data_quantile", "env_lo", "env_hi"))
        for row in zip(self.probe_quantiles, self.env_lo, self.env_hi):
            w.writerow([f"{v:.10g}" for v in row])
        return buf.getvalue()


def qq_envelope(fit, data, n_sim: int = DEFAULT_N_SIM, seed: int = 0,
                band: tuple[float, float] | None = None) -> QqEnvelope:
    """Envelope of ``n_sim`` QQ-plots of fitted-model samples against the data.

    ``fit`` is a :class:`~sinharcsinh.inference.FitReport` or a
    ``(family, theta)`` pair. Sample ``j`` comes from stream ``(seed, j)``, so
    a larger ``n_sim`` extends rather than replaces a smaller one. By default
    the envelope is the pointwise min/max; ``band=(lo_pct, hi_pct)`` uses
    pointwise percentiles instead.
    """
    if n_sim < 2:
        raise ValueError("n_sim must be >= 2")
    family, theta = (fit.family, fit.theta) if isinstance(fit, inference.FitReport) else fit
    x = np.sort(check_sample(data))
    n = x.size
    if band is None:
        lo = np.full(n, np.inf)
        hi = np.full(n, -np.inf)
        for j in range(n_sim):
            s = np.sort(inference.sample(family, theta, n, seed, j))
            np.minimum(lo, s, out=lo)
            np.maximum(hi, s, out=hi)
    else:
        sims = np.array([np.sort(inference.sample(family, theta, n, seed, j))
                         for j in range(n_sim)])
        lo, hi = np.percentile(sims, band, axis=0)
    return QqEnvelope(x, lo, hi, int(n_sim))


def inside_fraction(env: QqEnvelope, trim: float = 0.0) -> float:
    """Share of data quantiles inside the envelope, ignoring ``trim`` per tail."""
    n = env.probe_quantiles.size
    k = int(np.floor(trim * n))
    sl = slice(k, n - k)
    q = env.probe_quantiles[sl]
    return float(np.mean((env.env_lo[sl] <= q) & (q <= env.env_hi[sl])))


def envelope_svg(env: QqEnvelope, title: str = "", size: int = 480) -> str:
    """Self-contained SVG: shaded envelope and the identity line."""
    x, lo, hi = env.probe_quantiles, env.env_lo, env.env_hi
    vmin = float(min(x.min(), lo.min()))
    vmax = float(max(x.max(), hi.max()))
    pad = 40
    span = (vmax - vmin) or 1.0

    def px(v):
        return pad + (v - vmin) / span * (size - 2 * pad)

    def py(v):
        return size - pad - (v - vmin) / span * (size - 2 * pad)

    upper = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, hi))
    lower = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[::-1], lo[::-1]))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f'<polygon points="{upper} {lower}" fill="#bbbbbb" stroke="none"/>\n'
        f'<line x1="{px(vmin):.2f}" y1="{py(vmin):.2f}" x2="{px(vmax):.2f}" '
        f'y2="{py(vmax):.2f}" stroke="black" stroke-width="1.5"/>\n'
        f'<rect x="{pad}" y="{pad}" width="{size - 2 * pad}" height="{size - 2 * pad}" '
        f'fill="none" stroke="black"/>\n'
        f'<text x="{size / 2}" y="{pad / 2 + 5}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>\n'
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">data quantiles</text>\n'
        "</svg>\n"
    )


@dataclass
class OverlayTable:
    bin_edges: np.ndarray
    bin_density: np.ndarray
    grid: np.ndarray
    curves: dict

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("bin_lo", "bin_hi", "density"))
        for a, b, d in zip(self.bin_edges[:-1], self.bin_edges[1:], self.bin_density):
            w.writerow([f"{a:.10g}", f"{b:.10g}", f"{d:.10g}"])
        return buf.getvalue()

    def curves_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.curves)
        w.writerow(["x", *names])
        for i, v in enumerate(self.grid):
            w.writerow([f"{v:.10g}", *(f"{self.curves[k][i]:.10g}" for k in names)])
        return buf.getvalue()


def density_overlay(fits: Sequence, data, grid_size: int = 200) -> OverlayTable:
    """Freedman-Diaconis histogram plus fitted densities on a padded grid.

    The grid runs from ``min - 10% range`` to ``max + 10% range``.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    x = check_sample(data, min_size=2)
    edges = np.histogram_bin_edges(x, bins="fd")
    dens, edges = np.histogram(x, bins=edges, density=True)
    lo, hi = x.min(), x.max()
    pad = 0.1 * (hi - lo)
    grid = np.linspace(lo - pad, hi + pad, grid_size)
    curves = {}
    for f in fits:
        curves[f.family.value] = np.asarray(inference.pdf(f.family, f.theta, grid))
    return OverlayTable(edges, dens, grid, curves)
