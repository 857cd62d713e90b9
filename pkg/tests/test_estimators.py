import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from posconv.estimators import ConvergenceAnalyzer, JdlgDecomposition
from posconv.exceptions import DimensionMismatch, NotConvergent
from posconv.gallery import gallery_model
from posconv.groups import DYADICS, koopman_counterexample


def test_params_and_clone():
    est = ConvergenceAnalyzer(tol=1e-6, horizon=10)
    assert est.get_params() == {"tol": 1e-6, "horizon": 10, "depth": 8, "epsilon": 0.1}
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est
    assert JdlgDecomposition().set_params(tol=1e-5).tol == 1e-5


def test_unfitted():
    with pytest.raises(NotFittedError):
        JdlgDecomposition().transform(np.ones((1, 3)))
    with pytest.raises(NotFittedError):
        ConvergenceAnalyzer().predict(np.ones((1, 3)))


def test_jdlg_transform_splits_rows(rng):
    rep = koopman_counterexample(DYADICS, 3)
    est = JdlgDecomposition().fit(rep)
    X = rng.random((5, 3))
    R, S = est.transform(X), est.stable_part(X)
    assert np.allclose(R + S, X)
    # translations of Z/3 are invertible isometries: everything is reversible
    assert np.allclose(S, 0, atol=1e-10)
    assert est.n_features_in_ == 3


def test_jdlg_jump_flow_reversible_part_is_constant(rng):
    rep = gallery_model("jump-flow").rep
    X = rng.random((4, 4))
    R = JdlgDecomposition().fit(rep).transform(X)
    assert np.allclose(R, X.mean(axis=1, keepdims=True) * np.ones(4), atol=1e-10)


def test_predict_limits(rng):
    rep = gallery_model("irreducible-ctmc").rep
    est = ConvergenceAnalyzer().fit(rep)
    X = rng.random((3, 8))
    L = est.predict(X)
    pi = est.limit_projection_[:, 0]
    assert np.allclose(rep.Q @ pi, 0, atol=1e-10)
    assert np.allclose(L, X.sum(axis=1, keepdims=True) * pi[None, :], atol=1e-10)
    with pytest.raises(DimensionMismatch):
        est.predict(np.ones((1, 3)))


def test_predict_without_verdict():
    est = ConvergenceAnalyzer().fit(koopman_counterexample(DYADICS, 3))
    with pytest.raises(NotConvergent):
        est.predict(np.ones(3))
