"""Maximum-likelihood fitting, information criteria and profile intervals.

Parameters are optimised in an unconstrained working space: ``sigma`` and
``delta`` on the log scale, the epsilon-skew ``gamma`` through ``atanh``,
everything else as is. The two-piece likelihood has a kink in its second
derivative at the mode, so only function values are used.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import numerics as nx
from ._validation import InsufficientDataError, check_sample
from .sas import SasParams, f0_logpdf, sas_cdf, sas_logpdf, sas_quantile, sas_sample
from .skewsym import SsSasParams, sssas_cdf, sssas_logpdf, sssas_quantile, sssas_sample
from .twopiece import TpSasParams, tpsas_cdf, tpsas_logpdf, tpsas_quantile, tpsas_sample

__all__ = [
    "Family",
    "ModelSpec",
    "FitReport",
    "ProfileInterval",
    "PROFILE_LEVEL",
    "log_likelihood",
    "fit_ml",
    "profile_interval",
    "compare_models",
    "format_table",
    "min_observations",
]

# relative-likelihood cut for approximate 95% intervals
PROFILE_LEVEL = 0.147
# log-scale parameters may move at most this far from their robust start;
# beyond it the likelihood is a flat ridge and the estimate is meaningless
WORKING_BOX = 20.0
_LOG_FLOOR = -np.finfo(float).max


class Family(str, enum.Enum):
    NORMAL = "normal"
    SKEW_NORMAL = "sn"
    SAS = "sas"
    TPSAS = "tpsas"
    SSSAS = "sssas"

    @property
    def param_names(self) -> tuple[str, ...]:
        return _PARAM_NAMES[self]

    @property
    def n_params(self) -> int:
        return len(_PARAM_NAMES[self])

    @property
    def label(self) -> str:
        return _LABELS[self]


_PARAM_NAMES = {
    Family.NORMAL: ("mu", "sigma"),
    Family.SKEW_NORMAL: ("mu", "sigma", "lam"),
    Family.SAS: ("mu", "sigma", "epsilon", "delta"),
    Family.TPSAS: ("mu", "sigma", "gamma", "delta"),
    Family.SSSAS: ("mu", "sigma", "lam", "delta"),
}
_LABELS = {
    Family.NORMAL: "Normal",
    Family.SKEW_NORMAL: "SN",
    Family.SAS: "SAS",
    Family.TPSAS: "TP SAS",
    Family.SSSAS: "SS SAS",
}
# working-space transform per parameter name
_TRANSFORM = {"mu": "id", "sigma": "log", "delta": "log", "gamma": "atanh",
              "lam": "id", "epsilon": "id"}


@dataclass(frozen=True)
class ModelSpec:
    family: Family

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))

    @property
    def n_params(self) -> int:
        return self.family.n_params


def _family(model) -> Family:
    if isinstance(model, ModelSpec):
        return model.family
    return Family(model)


def min_observations(model) -> int:
    """Smallest sample accepted by :func:`fit_ml`.

    The normal MLE exists in closed form once it has a spread to estimate;
    the shape families get five spare observations.
    """
    fam = _family(model)
    return fam.n_params + 1 if fam is Family.NORMAL else fam.n_params + 5


# ---------------------------------------------------------------------------
# densities per family

def _check_domain(fam, theta):
    theta = tuple(float(t) for t in theta)
    if len(theta) != fam.n_params:
        raise ValueError(f"{fam.label} takes {fam.n_params} parameters, got {len(theta)}")
    for name, value in zip(fam.param_names, theta):
        tr = _TRANSFORM[name]
        if not np.isfinite(value):
            raise ValueError(f"{name} must be finite")
        if tr == "log" and value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")
        if tr == "atanh" and not -1 < value < 1:
            raise ValueError(f"{name} must lie in (-1, 1), got {value}")
    return theta


def distribution(model, theta):
    """Parameter object of the underlying distribution module."""
    fam = _family(model)
    t = _check_domain(fam, theta)
    if fam is Family.NORMAL:
        return SasParams(t[0], t[1], 0.0, 1.0)
    if fam is Family.SKEW_NORMAL:
        return SsSasParams(t[0], t[1], t[2], 1.0)
    if fam is Family.SAS:
        return SasParams(*t)
    if fam is Family.TPSAS:
        return TpSasParams(*t)
    return SsSasParams(*t)


def _logpdf_fast(fam, t, x):
    # no validation; callers guarantee the domain
    if fam is Family.NORMAL:
        z = (x - t[0]) / t[1]
        return -0.5 * z * z - math.log(t[1]) - 0.5 * nx.LOG_2PI
    if fam is Family.TPSAS:
        mu, sigma, gamma, delta = t
        left, right = sigma * (1.0 + gamma), sigma * (1.0 - gamma)
        z = (x - mu) / np.where(x < mu, left, right)
        return math.log(2.0 / (left + right)) + f0_logpdf(z, delta)
    if fam is Family.SAS:
        return sas_logpdf(x, SasParams(*t))
    if fam is Family.SKEW_NORMAL:
        z = (x - t[0]) / t[1]
        return (nx.LOG_2 - math.log(t[1]) - 0.5 * z * z - 0.5 * nx.LOG_2PI
                + nx.std_normal_logcdf(t[2] * z))
    return sssas_logpdf(x, SsSasParams(*t))


def logpdf(model, theta, x):
    fam = _family(model)
    t = _check_domain(fam, theta)
    return nx._scalar(_logpdf_fast(fam, t, np.asarray(x, dtype=float)))


def pdf(model, theta, x):
    return nx._scalar(np.exp(logpdf(model, theta, x)))


def cdf(model, theta, x):
    p = distribution(model, theta)
    if isinstance(p, SasParams):
        return sas_cdf(x, p)
    if isinstance(p, TpSasParams):
        return tpsas_cdf(x, p)
    return sssas_cdf(x, p)


def quantile(model, theta, u):
    p = distribution(model, theta)
    if isinstance(p, SasParams):
        return sas_quantile(u, p)
    if isinstance(p, TpSasParams):
        return tpsas_quantile(u, p)
    return sssas_quantile(u, p)


def sample(model, theta, n, seed, *stream):
    p = distribution(model, theta)
    if isinstance(p, SasParams):
        return sas_sample(n, p, seed, *stream)
    if isinstance(p, TpSasParams):
        return tpsas_sample(n, p, seed, *stream)
    return sssas_sample(n, p, seed, *stream)


def log_likelihood(model, theta, data) -> float:
    """Sum of log-densities; a finite floor replaces an underflowed -inf."""
    fam = _family(model)
    t = _check_domain(fam, theta)
    x = check_sample(data)
    ll = float(np.sum(_logpdf_fast(fam, t, x)))
    return ll if ll > _LOG_FLOOR else _LOG_FLOOR


# ---------------------------------------------------------------------------
# working space

def to_working(model, theta) -> np.ndarray:
    fam = _family(model)
    out = []
    for name, v in zip(fam.param_names, theta):
        tr = _TRANSFORM[name]
        out.append(math.log(v) if tr == "log" else math.atanh(v) if tr == "atanh" else v)
    return np.array(out, dtype=float)


def from_working(model, w) -> tuple[float, ...]:
    fam = _family(model)
    out = []
    for name, v in zip(fam.param_names, w):
        tr = _TRANSFORM[name]
        out.append(math.exp(v) if tr == "log" else math.tanh(v) if tr == "atanh" else float(v))
    return tuple(out)


def _coordinate_from_working(name, v):
    tr = _TRANSFORM[name]
    return math.exp(v) if tr == "log" else math.tanh(v) if tr == "atanh" else float(v)


def _negloglik(fam, x):
    names = fam.param_names
    trs = [_TRANSFORM[n] for n in names]

    def f(w):
        t = []
        for tr, v in zip(trs, w):
            if tr == "log":
                if v > 700:
                    return np.inf
                t.append(math.exp(v))
            elif tr == "atanh":
                g = math.tanh(v)
                if not -1.0 < g < 1.0:
                    return np.inf
                t.append(g)
            else:
                t.append(v)
        with np.errstate(all="ignore"):
            ll = float(np.sum(_logpdf_fast(fam, t, x)))
        return -ll if ll == ll else np.inf

    return f


def starting_values(model, data) -> tuple[float, ...]:
    """Robust starts: median, normal-scaled half IQR, symmetric shapes."""
    fam = _family(model)
    x = np.asarray(data, dtype=float)
    q1, med, q3 = np.quantile(x, [0.25, 0.5, 0.75])
    sigma = (q3 - q1) / 2.0 / 0.6744897501960817
    if not sigma > 0:
        sigma = float(np.std(x)) or 1.0
    if fam is Family.NORMAL:
        return (float(np.mean(x)), float(np.std(x)) or sigma)
    if fam is Family.SKEW_NORMAL:
        return (med, sigma, 0.0)
    if fam is Family.SAS:
        return (med, sigma, 0.0, 1.0)
    if fam is Family.TPSAS:
        # mean below median points to a heavier left side, i.e. gamma > 0
        return (med, sigma, 0.1 * float(np.sign(med - np.mean(x))), 1.0)
    return (med, sigma, 0.0, 1.0)


def _initial_steps(fam, theta):
    return np.array([0.25 * theta[1] if n == "mu" else
                     0.25 * max(1.0, abs(v)) if _TRANSFORM[n] == "id" else 0.25
                     for n, v in zip(fam.param_names, theta)])


# ---------------------------------------------------------------------------
# reports

class ProfileInterval(NamedTuple):
    """Profile-likelihood interval; an open side reports the domain boundary."""

    lo: float
    hi: float
    lower_open: bool = False
    upper_open: bool = False


@dataclass
class FitReport:
    model: ModelSpec
    estimates: dict
    loglik: float
    aic: float
    bic: float
    converged: bool
    n_obs: int
    intervals: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def theta(self) -> tuple[float, ...]:
        return tuple(self.estimates[n] for n in self.model.family.param_names)

    @property
    def family(self) -> Family:
        return self.model.family

    def to_dict(self) -> dict:
        fam = self.model.family
        return {
            "model": fam.value,
            "n_params": fam.n_params,
            "n_obs": self.n_obs,
            "converged": self.converged,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "estimates": {n: self.estimates[n] for n in fam.param_names},
            "intervals": {n: {"lo": iv.lo, "hi": iv.hi, "lower_open": iv.lower_open,
                              "upper_open": iv.upper_open}
                          for n, iv in self.intervals.items()},
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        fam = Family(d["model"])
        return cls(
            model=ModelSpec(fam),
            estimates={n: float(d["estimates"][n]) for n in fam.param_names},
            loglik=float(d["loglik"]), aic=float(d["aic"]), bic=float(d["bic"]),
            converged=bool(d["converged"]), n_obs=int(d["n_obs"]),
            intervals={n: ProfileInterval(float(v["lo"]), float(v["hi"]),
                                          bool(v["lower_open"]), bool(v["upper_open"]))
                       for n, v in d.get("intervals", {}).items()},
            error=d.get("error"),
        )


def information_criteria(loglik, k, n):
    return 2.0 * k - 2.0 * loglik, k * math.log(n) - 2.0 * loglik


def fit_ml(model, data, settings: nx.OptimizerSettings | None = None, seed: int = 0,
           profile: bool = False) -> FitReport:
    """Maximum-likelihood fit.

    The search starts from :func:`starting_values`; ``settings.restarts``
    further starts are drawn around it from the stream ``seed`` and the best
    optimum wins. Log-scale parameters are confined to ``WORKING_BOX`` of
    their start; an optimum within one unit of that wall usually means the
    likelihood has no finite maximizer and is reported as not converged.
    With ``profile=True`` every parameter also gets a profile-likelihood
    interval.
    """
    fam = _family(model)
    spec = ModelSpec(fam)
    settings = settings or nx.OptimizerSettings()
    x = check_sample(data, min_size=min_observations(fam))
    theta0 = starting_values(fam, x)
    w0 = to_working(fam, theta0)
    steps = _initial_steps(fam, theta0)
    boxed = np.array([_TRANSFORM[n] == "log" for n in fam.param_names])
    unboxed = _negloglik(fam, x)

    def f(w):
        if np.any(np.abs(w[boxed] - w0[boxed]) > WORKING_BOX):
            return np.inf
        return unboxed(w)

    best = nx.minimize(f, w0, settings, step=steps)
    if settings.restarts:
        rng = nx.make_rng(seed, 0x5eed)
        for _ in range(settings.restarts):
            ws = w0 + rng.normal(0.0, 1.0, w0.size) * steps * 2.0
            if not np.isfinite(f(ws)):
                continue
            res = nx.minimize(f, ws, settings, step=steps)
            if res.fun < best.fun - settings.f_tolerance:
                best = res
    theta = from_working(fam, best.x)
    ll = -float(best.fun)
    aic, bic = information_criteria(ll, fam.n_params, x.size)
    on_wall = bool(np.any(np.abs(best.x[boxed] - w0[boxed]) > WORKING_BOX - 1.0))
    report = FitReport(spec, dict(zip(fam.param_names, theta)), ll, aic, bic,
                       bool(best.converged) and not on_wall, int(x.size))
    if profile:
        for i, name in enumerate(fam.param_names):
            report.intervals[name] = profile_interval(spec, x, i, report)
    return report


# ---------------------------------------------------------------------------
# profile likelihood

_PROFILE_SETTINGS = nx.OptimizerSettings(max_iterations=4000, x_tolerance=1e-7,
                                         f_tolerance=1e-9, restarts=1)


def _profile_cap(name, value, sigma):
    """Largest working-space offset explored from the estimate."""
    if name == "mu":
        return 50.0 * sigma
    tr = _TRANSFORM[name]
    if tr == "log":
        return 6.0
    if tr == "atanh":
        return 10.0
    return 50.0 * (1.0 + abs(value))


def _domain_edge(name, direction):
    tr = _TRANSFORM[name]
    if tr == "log":
        return 0.0 if direction < 0 else math.inf
    if tr == "atanh":
        return float(direction)
    return float(direction) * math.inf


def profile_interval(model, data, param_index: int, fit: FitReport,
                     level: float = PROFILE_LEVEL,
                     settings: nx.OptimizerSettings | None = None) -> ProfileInterval:
    """Endpoints where the profile relative likelihood equals ``level``.

    The nuisance parameters are re-optimised at each trial value of the
    parameter of interest (warm-started from the previous point). If the
    relative likelihood stays above ``level`` out to a generous search cap,
    that side is reported as open at the domain boundary.
    """
    fam = _family(model)
    settings = settings or _PROFILE_SETTINGS
    x = check_sample(data)
    names = fam.param_names
    name = names[param_index]
    theta_hat = fit.theta
    w_hat = to_working(fam, theta_hat)
    full = _negloglik(fam, x)
    others = [j for j in range(len(names)) if j != param_index]
    nuis_steps = _initial_steps(fam, theta_hat)[others] * 0.4
    state = {"ll_hat": fit.loglik}

    def profiled(t, warm):
        if not others:
            w = np.array([t])
            return -full(w), warm

        def g(wn):
            w = np.empty(len(names))
            w[param_index] = t
            w[others] = wn
            return full(w)

        res = nx.minimize(g, warm, settings, step=nuis_steps)
        ll = -float(res.fun)
        state["ll_hat"] = max(state["ll_hat"], ll)
        return ll, res.x

    cut = math.log(level)
    h0 = 2.0 / math.sqrt(x.size) * (theta_hat[1] if name == "mu" else 1.0)
    cap = _profile_cap(name, theta_hat[param_index], theta_hat[1])
    ends = []
    for direction in (-1.0, 1.0):
        inside_t, inside_warm = w_hat[param_index], w_hat[others]
        offset = h0
        bracket = None
        while offset <= cap:
            t = w_hat[param_index] + direction * offset
            ll, warm = profiled(t, inside_warm)
            if ll - state["ll_hat"] < cut:
                bracket = (inside_t, t)
                break
            inside_t, inside_warm = t, warm
            offset *= 2.0
        if bracket is None:
            ends.append((_domain_edge(name, direction), True))
            continue
        warm_for_root = inside_warm

        def rel(t):
            return profiled(t, warm_for_root)[0] - state["ll_hat"] - cut

        lo, hi = sorted(bracket)
        try:
            root = nx.find_root(rel, (lo, hi), tol=1e-7 * max(1.0, abs(lo)))
        except nx.BracketError:
            # a better maximum turned up while bracketing; search from the estimate
            warm_for_root = w_hat[others]
            lo, hi = sorted((w_hat[param_index], bracket[1]))
            root = nx.find_root(rel, (lo, hi), tol=1e-7 * max(1.0, abs(lo)))
        ends.append((_coordinate_from_working(name, root), False))
    (lo, lo_open), (hi, hi_open) = ends
    return ProfileInterval(lo, hi, lo_open, hi_open)


def relative_profile_likelihood(model, data, param_index, fit, value,
                                settings: nx.OptimizerSettings | None = None) -> float:
    """Profile likelihood at ``value`` divided by the maximum likelihood."""
    fam = _family(model)
    settings = settings or _PROFILE_SETTINGS
    x = check_sample(data)
    names = fam.param_names
    w_hat = to_working(fam, fit.theta)
    t = to_working(fam, [value if j == param_index else fit.theta[j]
                         for j in range(len(names))])[param_index]
    full = _negloglik(fam, x)
    others = [j for j in range(len(names)) if j != param_index]

    def g(wn):
        w = np.empty(len(names))
        w[param_index] = t
        w[others] = wn
        return full(w)

    res = nx.minimize(g, w_hat[others], settings,
                      step=_initial_steps(fam, fit.theta)[others] * 0.4)
    return math.exp(-float(res.fun) - fit.loglik)


# ---------------------------------------------------------------------------
# model comparison

def compare_models(data, models: Sequence, settings: nx.OptimizerSettings | None = None,
                   seed: int = 0, profile: bool = True) -> list[FitReport]:
    """Fit every model and rank by AIC (ties broken by BIC).

    A model whose fit raises is kept as a row with ``error`` set; rows that
    did not converge are listed after the ranked ones.
    """
    models = [ModelSpec(_family(m)) for m in models]
    if not models:
        raise ValueError("need at least one model")
    x = check_sample(data)
    rows = []
    for i, m in enumerate(models):
        try:
            rows.append(fit_ml(m, x, settings, seed, profile=profile))
        except (ValueError, nx.ConvergenceError, InsufficientDataError) as exc:
            nan = float("nan")
            rows.append(FitReport(m, {n: nan for n in m.family.param_names}, nan, nan, nan,
                                  False, int(x.size), error=str(exc)))
    ranked = sorted((r for r in rows if r.converged and r.error is None),
                    key=lambda r: (r.aic, r.bic))
    rest = [r for r in rows if not (r.converged and r.error is None)]
    return ranked + rest


def _fmt(v, digits=2):
    if v is None or not np.isfinite(v):
        return "inf" if v == math.inf else "-inf" if v == -math.inf else "--"
    return f"{v:.{digits}f}"


def format_table(reports: Sequence[FitReport]) -> str:
    """Plain-text table: estimates, intervals in brackets, AIC and BIC.

    The smallest AIC and BIC values are wrapped in ``**`` (bold).
    """
    ok = [r for r in reports if r.error is None and np.isfinite(r.aic)]
    best_aic = min((r.aic for r in ok), default=None)
    best_bic = min((r.bic for r in ok), default=None)
    header = ["Model", "mu", "sigma", "shape", "delta", "AIC", "BIC"]
    lines = []
    for r in reports:
        fam = r.family
        cells = [fam.label]
        for name in ("mu", "sigma"):
            cells.append(_cell(r, name))
        shape = next((n for n in fam.param_names if n in ("gamma", "lam", "epsilon")), None)
        cells.append(_cell(r, shape) if shape else "--")
        cells.append(_cell(r, "delta") if "delta" in fam.param_names else "--")
        aic, bic = _fmt(r.aic), _fmt(r.bic)
        if best_aic is not None and r.aic == best_aic:
            aic = f"**{aic}**"
        if best_bic is not None and r.bic == best_bic:
            bic = f"**{bic}**"
        cells += [aic, bic]
        if r.error:
            cells.append(f"failed: {r.error}")
        elif not r.converged:
            cells.append("not converged")
        lines.append(cells)
    widths = [max(len(str(c)) for c in col) for col in zip(header, *[l[:7] for l in lines])]
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for cells in lines:
        row = "  ".join(str(c).ljust(w) for c, w in zip(cells[:7], widths))
        out.append((row + "  " + "  ".join(cells[7:])).rstrip())
    return "\n".join(out)


def _cell(r, name):
    v = r.estimates.get(name, float("nan"))
    iv = r.intervals.get(name)
    if iv is None:
        return _fmt(v)
    return f"{_fmt(v)}({_fmt(iv.lo)},{_fmt(iv.hi)})"
