"""Mode-based asymmetry measures for unimodal densities.

``ag_measure`` is the probability mass right of the mode minus the mass
left of it. ``cj_functional`` compares, for each level ``p``, the two
points where the density equals ``p`` times its modal value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import numerics as nx
from .sas import SasParams, f0_quantile, sas_cdf, sas_pdf, sas_quantile
from .skewsym import SsSasParams, sssas_cdf, sssas_pdf
from .twopiece import TpSasParams, tpsas_cdf, tpsas_pdf

__all__ = [
    "MultimodalError",
    "UnimodalDensity",
    "CjCurve",
    "unimodal",
    "find_mode",
    "ag_measure",
    "cj_functional",
    "cj_curve",
]

GRID_SIZE = 2001
MODE_TOL = 1e-8
ROOT_TOL = 1e-10
MAX_DOUBLINGS = 60
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class MultimodalError(ValueError):
    """The pre-scan found more than one strict local maximum."""


@dataclass(frozen=True)
class UnimodalDensity:
    """A density with its cdf and where to look for the mode.

    ``center`` and ``scale`` place the pre-scan grid (dense near the center,
    geometrically spaced towards the ends of ``search_interval``) and set the
    initial bracket width for level crossings.
    """

    pdf: Callable
    cdf: Callable
    search_interval: nx.Interval
    known_mode: Optional[float] = None
    center: Optional[float] = None
    scale: Optional[float] = None

    def __post_init__(self):
        iv = self.search_interval
        if not isinstance(iv, nx.Interval):
            iv = nx.Interval(*iv)
            object.__setattr__(self, "search_interval", iv)
        if self.known_mode is not None and not iv.lo <= self.known_mode <= iv.hi:
            raise ValueError("known_mode lies outside the search interval")
        if self.center is None:
            object.__setattr__(self, "center", 0.5 * (iv.lo + iv.hi))
        if self.scale is None:
            object.__setattr__(self, "scale", iv.width / 40.0)

    def grid(self, size: int = GRID_SIZE) -> np.ndarray:
        iv, c, s = self.search_interval, self.center, self.scale
        t = np.linspace(np.arcsinh((iv.lo - c) / s), np.arcsinh((iv.hi - c) / s), size)
        x = c + s * np.sinh(t)
        x[0], x[-1] = iv.lo, iv.hi
        return x


class CjCurve(NamedTuple):
    p_grid: np.ndarray
    cj_values: np.ndarray


def unimodal(params) -> UnimodalDensity:
    """Build a :class:`UnimodalDensity` for SAS, TP SAS or SS SAS parameters."""
    if isinstance(params, SasParams):
        q = sas_quantile(np.array([1e-12, 0.25, 0.5, 0.75, 1 - 1e-12]), params)
        return UnimodalDensity(lambda x: sas_pdf(x, params), lambda x: sas_cdf(x, params),
                               nx.Interval(q[0], q[-1]), center=q[2],
                               scale=0.5 * (q[3] - q[1]))
    if isinstance(params, TpSasParams):
        left, right = params.scales()
        reach = 40.0 * max(left, right) * max(1.0, float(f0_quantile(1 - 1e-12, params.delta)))
        return UnimodalDensity(lambda x: tpsas_pdf(x, params), lambda x: tpsas_cdf(x, params),
                               nx.Interval(params.mu - reach, params.mu + reach),
                               known_mode=params.mu, center=params.mu,
                               scale=min(left, right))
    if isinstance(params, SsSasParams):
        # the density is bounded by 2 f0, so the symmetric SAS range covers it
        half = params.sigma * max(20.0, float(f0_quantile(1 - 1e-12, params.delta)))
        return UnimodalDensity(lambda x: sssas_pdf(x, params), lambda x: sssas_cdf(x, params),
                               nx.Interval(params.mu - half, params.mu + half),
                               center=params.mu, scale=params.sigma)
    raise TypeError(f"no unimodal density for {type(params).__name__}")


def find_mode(d: UnimodalDensity) -> float:
    """Maximizer of the density.

    A 2001-point pre-scan rejects multimodal input and locates the winning
    cell; golden-section search then narrows it, and a final Newton step on
    the log-density (accepted only if it does not lower the density) removes
    the flat-top resolution limit of comparing density values.
    """
    if d.known_mode is not None:
        return float(d.known_mode)
    x = d.grid()
    y = np.asarray(d.pdf(x), dtype=float)
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    peaks = np.flatnonzero(interior) + 1
    if peaks.size > 1:
        raise MultimodalError(f"{peaks.size} local maxima found near x = {x[peaks][:5]}")
    i = int(np.argmax(y))  # leftmost maximizer on ties
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
    m = _golden_max(d.pdf, lo, hi)
    return _newton_polish(d.pdf, m, lo, hi)


def _golden_max(f, a, b, tol=1e-10):
    c = b - _GOLDEN * (b - a)
    e = a + _GOLDEN * (b - a)
    fc, fe = f(c), f(e)
    while abs(b - a) > tol * max(1.0, abs(a) + abs(b)):
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _GOLDEN * (b - a)
            fe = f(e)
    return 0.5 * (a + b)


def _newton_polish(pdf, m, lo, hi):
    h = 1e-5 * (hi - lo) / 2.0 + 1e-12 * abs(m)
    for _ in range(3):
        ym, y0, yp = np.log([pdf(m - h), pdf(m), pdf(m + h)])
        curv = yp - 2.0 * y0 + ym
        if not np.isfinite(curv) or curv >= 0:
            break
        step = -0.5 * h * (yp - ym) / curv
        cand = m + step
        if not (lo <= cand <= hi) or np.log(pdf(cand)) < y0:
            break
        m = cand
        if abs(step) < 1e-13 * max(1.0, abs(m)):
            break
    return float(m)


def ag_measure(d: UnimodalDensity, mode: float | None = None) -> float:
    """Mass right of the mode minus mass left of it, in (-1, 1)."""
    m = find_mode(d) if mode is None else mode
    return float(1.0 - 2.0 * d.cdf(m))


def _crossing(d, mode, level, direction):
    step = d.scale

    def g(x):
        return d.pdf(x) - level

    for _ in range(MAX_DOUBLINGS):
        edge = mode + direction * step
        if g(edge) < 0:
            lo, hi = sorted((mode, edge))
            return nx.find_root(g, (lo, hi), tol=ROOT_TOL)
        step *= 2.0
    raise nx.BracketError(
        f"density does not fall below {level:.3g} within {MAX_DOUBLINGS} doublings")


def cj_functional(d: UnimodalDensity, p: float, mode: float | None = None) -> float:
    """Normalised offset of the level-``p`` crossings around the mode."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    m = find_mode(d) if mode is None else mode
    level = p * d.pdf(m)
    x_left = _crossing(d, m, level, -1.0)
    x_right = _crossing(d, m, level, +1.0)
    return float((x_right - 2.0 * m + x_left) / (x_right - x_left))


def cj_curve(d: UnimodalDensity, p_grid) -> CjCurve:
    p_grid = np.asarray(p_grid, dtype=float)
    m = find_mode(d)
    return CjCurve(p_grid, np.array([cj_functional(d, p, m) for p in p_grid]))
