"""Two-piece sinh-arcsinh (TP SAS) distribution.

Two halves of the symmetric SAS density ``f0(.; delta)`` are joined at the
mode ``mu`` with scale ``sigma * b(gamma)`` on the left and
``sigma * a(gamma)`` on the right. Skewness therefore lives in the body of
the distribution while both tails keep the same decay rate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import numerics as nx
from ._validation import check_finite, check_positive, check_probability, check_sample_size
from .sas import f0_cdf, f0_logpdf, f0_quantile

__all__ = [
    "Parameterisation",
    "TpSasParams",
    "tpsas_logpdf",
    "tpsas_pdf",
    "tpsas_cdf",
    "tpsas_quantile",
    "tpsas_sample",
    "tpsas_moment",
    "reparameterise",
]


class Parameterisation(str, enum.Enum):
    """How ``gamma`` maps to the two scale factors ``{a, b}``.

    EPSILON_SKEW: a = 1 - gamma, b = 1 + gamma, gamma in (-1, 1).
    INVERSE_SCALE_FACTORS: a = 1 / gamma, b = gamma, gamma > 0.
    TWO_SIGMA: ``sigma`` is the left scale and ``gamma`` the right scale.
    """

    EPSILON_SKEW = "epsilon_skew"
    INVERSE_SCALE_FACTORS = "inverse_scale_factors"
    TWO_SIGMA = "two_sigma"

    @classmethod
    def _missing_(cls, value):
        alias = {"eps": cls.EPSILON_SKEW, "isf": cls.INVERSE_SCALE_FACTORS}
        return alias.get(str(value).lower())


EPS = Parameterisation.EPSILON_SKEW
ISF = Parameterisation.INVERSE_SCALE_FACTORS
TWO_SIGMA = Parameterisation.TWO_SIGMA


@dataclass(frozen=True)
class TpSasParams:
    mu: float = 0.0
    sigma: float = 1.0
    gamma: float = 0.0
    delta: float = 1.0
    parameterisation: Parameterisation = EPS

    def __post_init__(self):
        object.__setattr__(self, "parameterisation", Parameterisation(self.parameterisation))
        check_finite(self.mu, "mu")
        check_positive(self.sigma, "sigma")
        check_positive(self.delta, "delta")
        kind = self.parameterisation
        if kind is EPS and not -1.0 < self.gamma < 1.0:
            raise ValueError(f"epsilon-skew gamma must lie in (-1, 1), got {self.gamma!r}")
        if kind in (ISF, TWO_SIGMA):
            check_positive(self.gamma, "gamma")

    @classmethod
    def from_two_sigma(cls, mu, sigma_left, sigma_right, delta):
        return cls(mu, sigma_left, sigma_right, delta, TWO_SIGMA)

    def scales(self) -> tuple[float, float]:
        """(left scale, right scale) = (sigma * b, sigma * a)."""
        s, g = self.sigma, self.gamma
        if self.parameterisation is EPS:
            return s * (1.0 + g), s * (1.0 - g)
        if self.parameterisation is ISF:
            return s * g, s / g
        return s, g

    def ab(self) -> tuple[float, float]:
        """Scale factors ``(a, b)``; for TWO_SIGMA they are normalised to a + b = 2."""
        if self.parameterisation is EPS:
            return 1.0 - self.gamma, 1.0 + self.gamma
        if self.parameterisation is ISF:
            return 1.0 / self.gamma, self.gamma
        left, right = self.scales()
        m = 0.5 * (left + right)
        return right / m, left / m

    @property
    def mode_mass(self) -> float:
        """P(X < mu) = b / (a + b)."""
        left, right = self.scales()
        return left / (left + right)


def tpsas_logpdf(x, p: TpSasParams):
    x = np.asarray(x, dtype=float)
    left, right = p.scales()
    scale = np.where(x < p.mu, left, right)
    out = np.log(2.0 / (left + right)) + f0_logpdf((x - p.mu) / scale, p.delta)
    return nx._scalar(out)


def tpsas_pdf(x, p: TpSasParams):
    return nx._scalar(np.exp(tpsas_logpdf(x, p)))


def tpsas_cdf(x, p: TpSasParams):
    x = np.asarray(x, dtype=float)
    left, right = p.scales()
    total = left + right
    below = 2.0 * left / total * f0_cdf((x - p.mu) / left, p.delta)
    above = (left - right) / total + 2.0 * right / total * f0_cdf((x - p.mu) / right, p.delta)
    out = np.where(x < p.mu, below, above)
    out = np.where(x == p.mu, left / total, out)
    return nx._scalar(out)


def tpsas_quantile(u, p: TpSasParams):
    u = check_probability(u)
    left, right = p.scales()
    total = left + right
    junction = left / total
    lower = u < junction
    # each branch only sees probabilities that are valid for it
    u_left = np.where(lower, u * total / (2.0 * left), 0.5)
    u_right = np.where(lower, 0.5, (u - (left - right) / total) * total / (2.0 * right))
    u_right = np.clip(u_right, 0.5, np.nextafter(1.0, 0.0))
    x_left = p.mu + left * f0_quantile(u_left, p.delta)
    x_right = p.mu + right * f0_quantile(u_right, p.delta)
    return nx._scalar(np.where(lower, x_left, x_right))


def tpsas_sample(n: int, p: TpSasParams, seed: int, *stream: int) -> np.ndarray:
    check_sample_size(n)
    u = nx.open_uniform(nx.make_rng(seed, *stream), n)
    return np.asarray(tpsas_quantile(u, p), dtype=float).reshape(n)


def break_points(p: TpSasParams):
    """Quantiles that split the real line into well-conditioned pieces."""
    probs = [1e-12, 1e-8, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1 - 1e-4,
             1 - 1e-8, 1 - 1e-12]
    return sorted(set(np.atleast_1d(tpsas_quantile(np.array(probs), p)).tolist()) | {p.mu})


def tpsas_moment(k: int, p: TpSasParams, abs_tol: float = 1e-8) -> float:
    """Raw moment ``E[X^k]`` by adaptive quadrature (finite for every k)."""
    if int(k) != k or k < 1:
        raise ValueError("moment order must be a positive integer")
    q = nx.integrate(lambda x: x ** k * tpsas_pdf(x, p), -np.inf, np.inf, abs_tol,
                     points=break_points(p))
    return q.value


def reparameterise(p: TpSasParams, target: Parameterisation) -> TpSasParams:
    """Same distribution expressed in another parameterisation."""
    target = Parameterisation(target)
    if target is p.parameterisation:
        return p
    left, right = p.scales()
    if target is EPS:
        return replace(p, sigma=0.5 * (left + right), gamma=(left - right) / (left + right),
                       parameterisation=EPS)
    if target is ISF:
        return replace(p, sigma=float(np.sqrt(left * right)), gamma=float(np.sqrt(left / right)),
                       parameterisation=ISF)
    return replace(p, sigma=left, gamma=right, parameterisation=TWO_SIGMA)
