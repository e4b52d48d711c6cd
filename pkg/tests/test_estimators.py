import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from sinharcsinh.estimators import (FlexibleDistribution, NormalDistribution,
                                    SinhArcsinh, SkewNormal, SkewSymmetricSinhArcsinh,
                                    TwoPieceSinhArcsinh)
from sinharcsinh.inference import fit_ml
from sinharcsinh.twopiece import TpSasParams, tpsas_sample


@pytest.fixture(scope="module")
def data():
    return tpsas_sample(600, TpSasParams(1, 2, 0.3, 1.1), 51)


def test_matches_fit_ml(data):
    est = TwoPieceSinhArcsinh().fit(data)
    rep = fit_ml("tpsas", data)
    assert est.theta_ == rep.theta
    assert est.loglik_ == rep.loglik and est.converged_
    assert est.score(data) == pytest.approx(rep.loglik, rel=1e-12)


def test_column_input(data):
    a = SkewNormal().fit(data)
    b = SkewNormal().fit(data.reshape(-1, 1))
    assert a.theta_ == b.theta_


def test_rejects_two_features():
    with pytest.raises(ValueError):
        NormalDistribution().fit(np.ones((10, 2)))


def test_clone_and_params():
    est = SinhArcsinh(restarts=3, random_state=5)
    c = clone(est)
    assert c.get_params() == est.get_params()
    assert c.get_params()["restarts"] == 3
    assert FlexibleDistribution(family="sssas").get_params()["family"] == "sssas"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        NormalDistribution().score_samples([0.0])


def test_transform_roundtrip(data):
    est = SkewSymmetricSinhArcsinh().fit(data)
    u = est.transform(data[:20])
    assert u.shape == (20, 1) and np.all((u > 0) & (u < 1))
    back = est.inverse_transform(u)
    assert np.allclose(back[:, 0], data[:20], atol=1e-8)


def test_sample_reproducible(data):
    est = NormalDistribution().fit(data)
    a = est.sample(10, random_state=3)
    assert a.shape == (10, 1)
    assert np.array_equal(a, est.sample(10, random_state=3))


def test_information_criteria(data):
    est = TwoPieceSinhArcsinh().fit(data)
    assert est.aic(data) == pytest.approx(est.aic_, rel=1e-12)
    assert est.bic(data) == pytest.approx(est.bic_, rel=1e-12)


def test_intervals_optional(data):
    est = NormalDistribution(compute_intervals=True).fit(data)
    assert set(est.report_.intervals) == {"mu", "sigma"}


def test_in_pipeline(data):
    pipe = make_pipeline(FunctionTransformer(lambda x: x - 1.0), TwoPieceSinhArcsinh())
    pipe.fit(data.reshape(-1, 1))
    assert pipe[-1].params_["mu"] == pytest.approx(
        TwoPieceSinhArcsinh().fit(data).params_["mu"] - 1.0, abs=1e-4)
