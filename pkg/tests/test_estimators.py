import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from mirrorspec import EXACT, DomainError, graybody_plateau, spectrum_closed_many
from mirrorspec.estimators import MirrorSpectrum, ThermalTailFit

GRID = np.geomspace(1e-3, 4.0, 400)[:, None]


def test_params_roundtrip():
    est = MirrorSpectrum(kappa=2.0, g=1e4)
    assert est.get_params()["g"] == 1e4
    assert clone(est).set_params(g=5.0).g == 5.0


def test_transform_matches_library():
    n = MirrorSpectrum(g=1e6).fit(GRID).transform(GRID)
    assert n.shape == (400, 1)
    assert np.array_equal(n[:, 0], spectrum_closed_many(GRID[:, 0], 1e6).n_omega)


def test_exact_method():
    X = np.array([[0.5], [1.0]])
    closed = MirrorSpectrum(g=1e3).fit_transform(X)
    exact = MirrorSpectrum(g=1e3, method=EXACT, max_workers=1).fit_transform(X)
    assert np.allclose(closed, exact, rtol=1e-6)


def test_unfitted():
    with pytest.raises(NotFittedError):
        MirrorSpectrum().transform(GRID)


def test_bad_input():
    est = MirrorSpectrum().fit()
    with pytest.raises(ValueError):
        est.transform(np.ones((3, 2)))
    with pytest.raises(ValueError):
        est.transform(np.array([[0.0]]))
    with pytest.raises(DomainError):
        MirrorSpectrum(method="guess").fit()
    with pytest.raises(DomainError):
        MirrorSpectrum(g=-1.0).fit()


def test_total_count():
    assert MirrorSpectrum(g=1e4).fit().total_count().n_total == pytest.approx(0.551101, rel=1e-5)


def test_thermal_fit_and_predict():
    y = spectrum_closed_many(GRID[:, 0], 1e6).n_omega
    fit = ThermalTailFit().fit(GRID, y)
    assert abs(fit.temperature_ * 2 * math.pi - 1) < 0.02
    assert abs(fit.plateau_ / graybody_plateau(1e6) - 1) < 0.05
    tail = GRID[GRID[:, 0] > 2]
    pred = fit.predict(tail)
    assert np.allclose(pred, spectrum_closed_many(tail[:, 0], 1e6).n_omega, rtol=0.05)
    assert fit.score(tail, spectrum_closed_many(tail[:, 0], 1e6).n_omega) > 0.99


def test_pipeline():
    pipe = make_pipeline(MirrorSpectrum(g=1e6))
    assert pipe.fit_transform(GRID).shape == (400, 1)


def test_thermal_fit_accepts_unsorted():
    y = spectrum_closed_many(GRID[:, 0], 1e6).n_omega
    perm = np.random.default_rng(0).permutation(len(y))
    a = ThermalTailFit().fit(GRID, y)
    b = ThermalTailFit().fit(GRID[perm], y[perm])
    assert a.temperature_ == pytest.approx(b.temperature_, rel=1e-12)
