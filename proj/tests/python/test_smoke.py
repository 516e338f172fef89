import math

import numpy as np
import pytest

import spca


def two_spike(n, gamma, seed):
    rng = np.random.default_rng(seed)
    p = round(gamma * n)
    t = 1 + math.sqrt(gamma)
    x = 2.0 * rng.standard_normal((p, n))
    x[0] *= math.sqrt(4 * t)
    x[1] *= math.sqrt(2 * t)
    return x


def test_scalar_functions():
    assert spca.rho(8.0, 1.0) == pytest.approx(8.0 * (1 + 1 / 7))
    assert spca.rho_inverse(spca.rho(8.0, 1.0), 1.0) == pytest.approx(8.0, rel=1e-12)
    assert spca.shrinkage_factor(8.0, 1.0) == pytest.approx(0.875)
    assert spca.adjustment_factor(spca.rho(8.0, 1.0), 1.0) == pytest.approx(8 / 7)
    assert spca.mp_edges(4.0) == pytest.approx((1.0, 9.0))
    assert spca.mp_integral(lambda x: x, 1.0) == pytest.approx(1.0, rel=1e-9)


def test_errors_map_to_python_exceptions():
    with pytest.raises(spca.DomainError):
        spca.shrinkage_factor(1.5, 1.0)
    with pytest.raises(spca.NotIdentifiable):
        spca.adjustment_factor(1.0, 1.0)
    assert issubclass(spca.DimensionError, spca.InputError)
    assert issubclass(spca.NotIdentifiable, spca.NumericalFailure)


def test_rescale_no_spike():
    d = np.linspace(2.0, 1.0, 100)
    rs = spca.rescale_eigenvalues(d, 200, 100)
    assert rs.k == 0
    assert rs.iterations == 1
    np.testing.assert_allclose(rs.d_hat, 200 * d / d.sum(), rtol=1e-14)


def test_fit_predict_round_trip(tmp_path):
    x = two_spike(100, 1.0, 3)
    model = spca.fit(x, mode="center", k=3)
    assert model.k_spikes == 2
    assert model.components[0].spike
    assert abs(model.components[0].shrinkage - 0.88) < 0.08

    train = spca.training_scores(model, x)
    scores = spca.predict(model, x)
    np.testing.assert_allclose(scores.naive, train, atol=1e-10)
    s = model.components[0].shrinkage
    np.testing.assert_allclose(scores.adjusted[0], scores.naive[0] / s, rtol=1e-12)

    path = tmp_path / "model.spca"
    spca.save_model(model, path)
    back = spca.load_model(path)
    np.testing.assert_array_equal(back.eigenvectors, model.eigenvectors)
    assert back.components[0].shrinkage == model.components[0].shrinkage

    with pytest.raises(spca.DimensionError):
        spca.predict(model, x[:-1])


def test_standardize_and_jackknife():
    x = two_spike(60, 1.0, 5)
    z, means, scales = spca.standardize(x, "center-scale")
    np.testing.assert_allclose(z.mean(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=1), 1.0, rtol=1e-12)
    np.testing.assert_allclose(means, x.mean(axis=1), rtol=1e-12)

    model = spca.fit(x)
    jk = spca.jackknife_shrinkage(x, component=0)
    assert jk.used + jk.excluded == 60
    assert abs(jk.shrinkage - model.components[0].shrinkage) < 0.1
