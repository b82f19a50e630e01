import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from screened_lgf import ScreenedPoissonLGF, evaluate_points
from screened_lgf.core import LatticeConfig, Method, ToleranceError
from screened_lgf.oracles import oracle_2d_grid


@pytest.mark.parametrize("c2, tag", [(4.0, Method.SERIES), (0.01, Method.FFT_BATCH)])
def test_fit_predict(c2, tag):
    X = np.array([[0, 0], [3, 2], [-5, 1], [2, -7]])
    est = ScreenedPoissonLGF(alpha1=0.8, c2=c2, eps=1e-12).fit(X)
    assert est.method_.tag is tag
    ref = oracle_2d_grid(est.config_, np.abs(X[:, 0]), np.abs(X[:, 1]), 8192).diagonal()
    assert np.abs(est.predict(X) - ref).max() < 1e-12


def test_single_point_uses_quadrature():
    est = ScreenedPoissonLGF(c2=1e-4).fit([[4, 1]])
    assert est.method_.tag is Method.QUAD1D
    assert est.predict([[4, 1]])[0] > 0


def test_predict_replans_for_larger_points():
    est = ScreenedPoissonLGF(c2=0.04, eps=1e-11).fit([[0, 0], [1, 1]])
    X = [[60, 3], [0, 0]]
    cfg = LatticeConfig(1.0, 0.04)
    ref = oracle_2d_grid(cfg, [60, 0], [3, 0], 4096).diagonal()
    assert np.abs(est.predict(X) - ref).max() < 1e-11


def test_series_table_path_matches_pointwise():
    cfg = LatticeConfig(0.5, 3.0)
    pts = np.array([[n, m] for n in range(6) for m in range(4)])
    few = evaluate_points(cfg, pts[:3], 1e-12)
    many = evaluate_points(cfg, pts, 1e-12)
    assert np.allclose(few, many[:3], atol=1e-15)


def test_validation():
    with pytest.raises(NotFittedError):
        ScreenedPoissonLGF().predict([[0, 0]])
    with pytest.raises(ValueError):
        ScreenedPoissonLGF().fit([[0, 0, 1]])
    with pytest.raises(ValueError):
        ScreenedPoissonLGF().fit([[0.5, 0]])
    with pytest.raises(ValueError):
        ScreenedPoissonLGF(alpha1=2.0).fit([[0, 0]])
    with pytest.raises(ToleranceError):
        ScreenedPoissonLGF(eps=1e-17).fit([[0, 0]])


def test_params_roundtrip():
    est = ScreenedPoissonLGF(alpha1=0.3, c2=2.0, eps=1e-9)
    params = clone(est).get_params()
    assert params["alpha1"] == 0.3 and params["c2"] == 2.0 and params["eps"] == 1e-9
    est.set_params(c2=5.0)
    assert est.c2 == 5.0
