"""scikit-learn compatible wrappers around the maximum-likelihood fits.

The estimators are density estimators: ``fit`` learns the parameters,
``score_samples`` returns log-densities, ``transform`` maps data to
probabilities through the fitted cdf and ``inverse_transform`` maps back
through the quantile function, so they slot into pipelines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import inference
from . import numerics as nx
from .inference import Family

__all__ = [
    "FlexibleDistribution",
    "NormalDistribution",
    "SkewNormal",
    "SinhArcsinh",
    "TwoPieceSinhArcsinh",
    "SkewSymmetricSinhArcsinh",
]


def _column(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature, got {X.shape[1]}")
        X = X[:, 0]
    return X


class FlexibleDistribution(DensityMixin, TransformerMixin, BaseEstimator):
    """Maximum-likelihood fit of one of the supported families.

    Parameters
    ----------
    family : {"normal", "sn", "sas", "tpsas", "sssas"}
    max_iterations, x_tolerance, f_tolerance, restarts :
        Simplex optimizer settings.
    compute_intervals : bool
        Also compute 0.147 profile-likelihood intervals (slower).
    random_state : int
        Seed for the perturbed restarts and for :meth:`sample`.

    Attributes
    ----------
    params_ : dict
        Estimated parameters by name.
    report_ : FitReport
    loglik_, aic_, bic_ : float
    """

    def __init__(self, family="tpsas", max_iterations=4000, x_tolerance=1e-7,
                 f_tolerance=1e-9, restarts=1, compute_intervals=False, random_state=0):
        self.family = family
        self.max_iterations = max_iterations
        self.x_tolerance = x_tolerance
        self.f_tolerance = f_tolerance
        self.restarts = restarts
        self.compute_intervals = compute_intervals
        self.random_state = random_state

    def _settings(self):
        return nx.OptimizerSettings(self.max_iterations, self.x_tolerance,
                                    self.f_tolerance, self.restarts)

    def fit(self, X, y=None):
        x = _column(X)
        self.report_ = inference.fit_ml(Family(self.family), x, self._settings(),
                                        seed=int(self.random_state or 0),
                                        profile=self.compute_intervals)
        self.params_ = dict(self.report_.estimates)
        self.loglik_ = self.report_.loglik
        self.aic_ = self.report_.aic
        self.bic_ = self.report_.bic
        self.converged_ = self.report_.converged
        self.n_features_in_ = 1
        return self

    @property
    def theta_(self):
        check_is_fitted(self, "report_")
        return self.report_.theta

    def score_samples(self, X):
        check_is_fitted(self, "report_")
        return np.asarray(inference.logpdf(self.report_.family, self.theta_, _column(X)))

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))

    def transform(self, X):
        """Probability integral transform under the fitted distribution."""
        check_is_fitted(self, "report_")
        u = np.asarray(inference.cdf(self.report_.family, self.theta_, _column(X)))
        return u.reshape(-1, 1)

    def inverse_transform(self, U):
        check_is_fitted(self, "report_")
        x = np.asarray(inference.quantile(self.report_.family, self.theta_, _column(U)))
        return x.reshape(-1, 1)

    def sample(self, n_samples=1, random_state=None):
        check_is_fitted(self, "report_")
        seed = self.random_state if random_state is None else random_state
        x = inference.sample(self.report_.family, self.theta_, n_samples, int(seed or 0))
        return np.asarray(x).reshape(-1, 1)

    def aic(self, X):
        ll = self.score(X)
        return 2.0 * Family(self.family).n_params - 2.0 * ll

    def bic(self, X):
        n = _column(X).size
        return Family(self.family).n_params * np.log(n) - 2.0 * self.score(X)


class NormalDistribution(FlexibleDistribution):
    def __init__(self, max_iterations=4000, x_tolerance=1e-7, f_tolerance=1e-9,
                 restarts=1, compute_intervals=False, random_state=0):
        super().__init__("normal", max_iterations, x_tolerance, f_tolerance, restarts,
                         compute_intervals, random_state)


class SkewNormal(FlexibleDistribution):
    def __init__(self, max_iterations=4000, x_tolerance=1e-7, f_tolerance=1e-9,
                 restarts=1, compute_intervals=False, random_state=0):
        super().__init__("sn", max_iterations, x_tolerance, f_tolerance, restarts,
                         compute_intervals, random_state)


class SinhArcsinh(FlexibleDistribution):
    def __init__(self, max_iterations=4000, x_tolerance=1e-7, f_tolerance=1e-9,
                 restarts=1, compute_intervals=False, random_state=0):
        super().__init__("sas", max_iterations, x_tolerance, f_tolerance, restarts,
                         compute_intervals, random_state)


class TwoPieceSinhArcsinh(FlexibleDistribution):
    """Two-piece SAS under the epsilon-skew parameterisation."""

    def __init__(self, max_iterations=4000, x_tolerance=1e-7, f_tolerance=1e-9,
                 restarts=1, compute_intervals=False, random_state=0):
        super().__init__("tpsas", max_iterations, x_tolerance, f_tolerance, restarts,
                         compute_intervals, random_state)


class SkewSymmetricSinhArcsinh(FlexibleDistribution):
    def __init__(self, max_iterations=4000, x_tolerance=1e-7, f_tolerance=1e-9,
                 restarts=1, compute_intervals=False, random_state=0):
        super().__init__("sssas", max_iterations, x_tolerance, f_tolerance, restarts,
                         compute_intervals, random_state)
