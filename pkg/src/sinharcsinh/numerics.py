"""Shared numerical kernels: normal functions, quadrature, root finding,
a Nelder-Mead minimizer and seedable random streams."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize as _sp_optimize
from scipy import special as _sp_special

__all__ = [
    "ConvergenceError",
    "BracketError",
    "Interval",
    "OptimizerSettings",
    "Minimum",
    "Quadrature",
    "std_normal_pdf",
    "std_normal_logpdf",
    "std_normal_cdf",
    "std_normal_logcdf",
    "std_normal_quantile",
    "integrate",
    "find_root",
    "minimize",
    "make_rng",
    "open_uniform",
    "logcosh",
]

LOG_2PI = float(np.log(2.0 * np.pi))
INV_SQRT_2PI = float(1.0 / np.sqrt(2.0 * np.pi))
LOG_2 = float(np.log(2.0))


class ConvergenceError(RuntimeError):
    """Raised when an iterative routine exhausts its budget."""


class BracketError(ValueError):
    """Raised when a root bracket does not change sign."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class OptimizerSettings:
    """Stopping rules for :func:`minimize`.

    ``restarts`` is the number of extra simplex rebuilds around the best
    point after the first run has converged.
    """

    max_iterations: int = 4000
    x_tolerance: float = 1e-7
    f_tolerance: float = 1e-9
    restarts: int = 1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.x_tolerance > 0 and self.f_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


class Minimum(NamedTuple):
    x: np.ndarray
    fun: float
    converged: bool
    nfev: int


class Quadrature(NamedTuple):
    value: float
    error: float


# ---------------------------------------------------------------------------
# standard normal

def std_normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return _scalar(INV_SQRT_2PI * np.exp(-0.5 * z * z))


def std_normal_logpdf(z):
    z = np.asarray(z, dtype=float)
    return _scalar(-0.5 * LOG_2PI - 0.5 * z * z)


def std_normal_cdf(z):
    return _scalar(_sp_special.ndtr(np.asarray(z, dtype=float)))


def std_normal_logcdf(z):
    return _scalar(_sp_special.log_ndtr(np.asarray(z, dtype=float)))


def std_normal_quantile(u):
    """Inverse of the standard normal cdf on the open unit interval."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise ValueError("probabilities must lie in the open interval (0, 1)")
    return _scalar(_sp_special.ndtri(u))


def logcosh(y):
    """log(cosh(y)) without overflow."""
    ay = np.abs(y)
    return ay + np.log1p(np.exp(-2.0 * ay)) - LOG_2


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod quadrature (7-point Gauss embedded in 15-point Kronrod)

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


def _eval(f, x):
    """Evaluate ``f`` on an array, falling back to elementwise calls."""
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(v)) for v in x.ravel()]).reshape(x.shape)


def gk_adaptive(f, lo, hi, tol, max_panels: int = 20000):
    """Adaptive GK15 on many finite segments at once.

    ``lo``, ``hi`` and ``tol`` are arrays with one entry per segment. A panel
    is accepted once its error estimate is below its share of the segment
    tolerance (proportional to its width). ``max_panels`` caps the number of
    panels created by splitting. Returns per-segment values and error
    estimates.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    tol = np.broadcast_to(np.asarray(tol, dtype=float), lo.shape)
    nseg = lo.size
    value = np.zeros(nseg)
    error = np.zeros(nseg)
    width = hi - lo
    seg = np.arange(nseg)
    a, b = lo.copy(), hi.copy()
    used = 0
    while a.size:
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x = c[:, None] + h[:, None] * NODES[None, :]
        y = _eval(f, x)
        k = h * (y @ KRONROD_WEIGHTS)
        g = h * (y @ GAUSS_WEIGHTS)
        err = np.abs(k - g)
        share = np.where(width[seg] != 0, np.abs(b - a) / np.abs(width[seg]), 1.0)
        # panels that can no longer be split meaningfully are accepted as is
        tiny = np.abs(h) <= 1e-15 * np.maximum(np.abs(c), 1e-300)
        # below roundoff level the estimate cannot improve by splitting
        floor = 64 * np.finfo(float).eps * np.abs(k)
        ok = (err <= np.maximum(tol[seg] * share, floor)) | tiny | ~np.isfinite(err)
        np.add.at(value, seg[ok], k[ok])
        np.add.at(error, seg[ok], err[ok])
        bad = ~ok
        if not bad.any():
            break
        used += 2 * int(bad.sum())
        if used > max_panels:
            np.add.at(value, seg[bad], k[bad])
            np.add.at(error, seg[bad], err[bad])
            raise ConvergenceError(
                f"quadrature budget of {max_panels} panels exhausted; "
                f"error estimate {error.sum():.3g} exceeds tolerance {tol.sum():.3g}"
            )
        a_bad, b_bad, c_bad, s_bad = a[bad], b[bad], c[bad], seg[bad]
        a = np.concatenate([a_bad, c_bad])
        b = np.concatenate([c_bad, b_bad])
        seg = np.concatenate([s_bad, s_bad])
    return value, error


def integrate(f: Callable, a: float, b: float, abs_tol: float = 1e-10,
              points: Sequence[float] | None = None,
              max_panels: int = 20000) -> Quadrature:
    """Integrate ``f`` over ``[a, b]``; either limit may be infinite.

    ``f`` should accept a numpy array. ``points`` are optional interior break
    points (locations where the integrand changes character); the width of
    the segment next to an infinite tail sets the length scale of that
    tail's change of variables.

    Raises :class:`ConvergenceError` if the panel budget runs out before the
    error estimate falls below ``abs_tol``.
    """
    if a == b:
        return Quadrature(0.0, 0.0)
    if a > b:
        q = integrate(f, b, a, abs_tol, points, max_panels)
        return Quadrature(-q.value, q.error)
    inner = sorted(float(p) for p in (() if points is None else points) if a < p < b and np.isfinite(p))
    edges = [a, *inner, b]
    nseg = len(edges) - 1
    widths = [hi - lo for lo, hi in zip(edges[:-1], edges[1:])]
    seg_tol = abs_tol / nseg
    total = 0.0
    total_err = 0.0
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        # a tail is mapped on the length scale of its finite neighbour, so
        # mass close to the break point is not squeezed between nodes
        near = [w for w in widths[max(k - 1, 0):k + 2] if np.isfinite(w) and w > 0]
        scale = near[0] if near else 1.0
        g, t0, t1, n0 = _change_of_variables(f, lo, hi, scale)
        # a few initial panels so narrow features are not stepped over
        tt = np.linspace(t0, t1, n0 + 1)
        v, e = gk_adaptive(g, tt[:-1], tt[1:], seg_tol * np.diff(tt) / (t1 - t0),
                           max_panels=max_panels)
        total += float(v.sum())
        total_err += float(e.sum())
    return Quadrature(total, total_err)


def _change_of_variables(f, lo, hi, scale):
    if np.isfinite(lo) and np.isfinite(hi):
        return f, lo, hi, 1
    if np.isfinite(lo):
        # x = lo + s t / (1 - t), t in [0, 1)
        def g(t):
            u = 1.0 - t
            return f(lo + scale * t / u) * (scale / (u * u))
        return g, 0.0, 1.0, 8
    if np.isfinite(hi):
        def g(t):
            u = 1.0 - t
            return f(hi - scale * t / u) * (scale / (u * u))
        return g, 0.0, 1.0, 8
    # x = s t / (1 - t^2), t in (-1, 1)
    def g(t):
        u = 1.0 - t * t
        return f(scale * t / u) * (scale * (1.0 + t * t) / (u * u))
    return g, -1.0, 1.0, 16


# ---------------------------------------------------------------------------
# root finding

def find_root(f: Callable[[float], float], bracket: Interval | tuple,
              tol: float = 1e-12) -> float:
    """Root of ``f`` inside a sign-changing bracket (Brent's method)."""
    lo, hi = (bracket.lo, bracket.hi) if isinstance(bracket, Interval) else bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi) or np.isnan(flo) or np.isnan(fhi):
        raise BracketError(f"f does not change sign on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    return float(_sp_optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                                     maxiter=500))


# ---------------------------------------------------------------------------
# Nelder-Mead

def minimize(fun: Callable[[np.ndarray], float], start, settings: OptimizerSettings | None = None,
             step=0.1) -> Minimum:
    """Derivative-free simplex minimization with restarts.

    After the first simplex collapses, it is rebuilt around the best point
    (``settings.restarts`` times at most) and the search resumes; this
    guards against premature collapse near kinks. ``converged`` is true only
    if the final run met both tolerances within the iteration budget.
    """
    settings = settings or OptimizerSettings()
    x0 = np.array(start, dtype=float)
    steps = np.broadcast_to(np.asarray(step, dtype=float), x0.shape).copy()
    nfev = 0

    def f(x):
        nonlocal nfev
        nfev += 1
        v = float(fun(x))
        return v if v == v else np.inf

    best_x, best_f = x0, f(x0)
    if not np.isfinite(best_f):
        raise ValueError("objective is not finite at the starting point")
    converged = False
    for attempt in range(settings.restarts + 1):
        x, fx, converged = _nelder_mead(f, best_x, best_f, steps, settings)
        improved = best_f - fx
        if fx <= best_f:
            best_x, best_f = x, fx
        if attempt > 0 and improved <= settings.f_tolerance and converged:
            break
    return Minimum(best_x, best_f, converged, nfev)


def _nelder_mead(f, x0, f0, steps, settings):
    n = x0.size
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0], fs[0] = x0, f0
    for i in range(n):
        x = x0.copy()
        x[i] += steps[i] if steps[i] != 0 else 0.00025
        sim[i + 1], fs[i + 1] = x, f(x)
    xtol, ftol = settings.x_tolerance, settings.f_tolerance
    for _ in range(settings.max_iterations):
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if (np.max(np.abs(sim[1:] - sim[0])) <= xtol
                and np.max(np.abs(fs[1:] - fs[0])) <= ftol):
            return sim[0].copy(), fs[0], True
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + (centroid - sim[-1])
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + 2.0 * (centroid - sim[-1])
            fe = f(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid + 0.5 * (sim[-1] - centroid)
            fc = f(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
                continue
        for i in range(1, n + 1):
            sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
            fs[i] = f(sim[i])
    order = np.argsort(fs, kind="stable")
    return sim[order[0]].copy(), fs[order[0]], False


# ---------------------------------------------------------------------------
# random streams

def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent PCG64 stream identified by ``(seed, *stream)``."""
    if seed is None:
        raise ValueError("an explicit integer seed is required")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws on the open interval (0, 1) with 53-bit resolution."""
    k = rng.integers(0, 2 ** 53, size=n, dtype=np.int64)
    return (k + 0.5) * 2.0 ** -53
