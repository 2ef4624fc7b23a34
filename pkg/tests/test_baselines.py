import numpy as np
import pytest

from geomreg.baselines import fit_blr_ard, fit_ols, fit_pca, fit_tangent_pga
from geomreg.errors import ValidationError
from geomreg.manifolds import Euclidean, Sphere
from geomreg.regression import Dataset, FitConfig, fit

from helpers import euclidean_problem, ols_oracle


def test_ols_exact_linear_data():
    X = np.linspace(-1, 2, 9)[:, None]
    Y = np.column_stack([1 + 2 * X[:, 0], -3 + 0.5 * X[:, 0]])
    m = fit_ols(Dataset(X, Y, Euclidean(2)))
    assert np.allclose(m.intercept, [1, -3])
    assert np.allclose(m.slopes, [[2, 0.5]])
    assert np.allclose(m.predict(X), Y)


def test_ols_degenerate_design():
    with pytest.raises(ValidationError, match="singular"):
        fit_ols(Dataset(np.ones((5, 1)), np.arange(5.0)[:, None], Euclidean(1)))


def test_ols_matches_normal_equations():
    data = euclidean_problem(3, d=1, q=1, n=50)
    m = fit_ols(data)
    b0, B = ols_oracle(data.X, data.Y)
    assert np.allclose(m.intercept, b0, atol=1e-10)
    assert np.allclose(m.slopes, B, atol=1e-10)


def test_blr_small_precision_limit_recovers_ols():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((60, 2))
    Y = 3.0 + X @ np.array([[4e3, -2e3], [1e3, 5e3]]) + rng.standard_normal((60, 2))
    data = Dataset(X, Y, Euclidean(2))
    blr, ols = fit_blr_ard(data), fit_ols(data)
    assert np.all(blr.alphas < 1e-5)
    a = np.vstack([blr.intercept, blr.slopes])
    b = np.vstack([ols.intercept, ols.slopes])
    assert np.max(np.abs(a - b)) <= 1e-8 * np.max(np.abs(b))


def test_blr_prunes_noise_column():
    rng = np.random.default_rng(9)
    n = 200
    x1 = rng.standard_normal(n)
    noise_col = rng.standard_normal(n)
    Y = np.column_stack([2 * x1, -x1]) + 0.1 * rng.standard_normal((n, 2))
    data = Dataset(np.column_stack([x1, noise_col]), Y, Euclidean(2))
    m = fit_blr_ard(data)
    assert list(m.active) == [True, False]
    assert m.alphas[1] == FitConfig().alpha_cap
    assert np.all(m.slopes[1] == 0.0)


@pytest.mark.parametrize("seed", range(3))
def test_blr_matches_bgrm_on_euclidean(seed):
    data = euclidean_problem(seed, d=3, q=3, n=40)
    ref = fit_blr_ard(data)
    model, _ = fit(data, mode="bgrm")
    assert np.array_equal(model.active, ref.active)
    assert np.allclose(model.intercept(), ref.intercept, atol=1e-6)
    assert np.allclose(model.slope_columns(), ref.slopes, atol=1e-6)
    assert model.tau == pytest.approx(ref.precision, abs=1e-6)


def test_pca_line_and_reconstruction():
    t = np.linspace(-1, 1, 21)
    direction = np.array([3.0, 4.0, 0.0]) / 5
    P = t[:, None] * direction + np.array([1.0, 1.0, 1.0])
    b = fit_pca(P, 1)
    assert abs(abs(b.directions[0] @ direction) - 1) < 1e-12
    rng = np.random.default_rng(0)
    Q = rng.standard_normal((30, 4))
    full = fit_pca(Q, 4)
    coords = (Q - full.base) @ full.directions.T
    assert np.max(np.abs(full.base + coords @ full.directions - Q)) < 1e-10


def test_pca_matches_covariance_eigenvalues():
    rng = np.random.default_rng(1)
    Q = rng.standard_normal((50, 5)) @ rng.standard_normal((5, 5))
    C = (Q - Q.mean(0)).T @ (Q - Q.mean(0)) / 49
    ref = np.sort(np.linalg.eigvalsh(C))[::-1]
    assert np.allclose(fit_pca(Q, 5).variances, ref, atol=1e-10)
    with pytest.raises(ValidationError):
        fit_pca(Q, 6)


def test_tangent_pga_euclidean_equals_pca():
    rng = np.random.default_rng(2)
    Q = rng.standard_normal((40, 3))
    a, b = fit_tangent_pga(Euclidean(3), Q, 2), fit_pca(Q, 2)
    assert np.allclose(a.directions, b.directions)
    assert np.allclose(a.variances, b.variances)


def test_tangent_pga_geodesic_data():
    S = Sphere(3)
    mu = S.normalize(np.array([1.0, 1.0, 1.0]))
    v = S.proj(mu, np.array([1.0, -1.0, 0.3]))
    v /= np.linalg.norm(v)
    Y = S.exp(mu, np.linspace(-0.8, 0.8, 30)[:, None] * v)
    b = fit_tangent_pga(S, Y, 2)
    assert b.variances[0] > 100 * max(b.variances[1], 1e-300)
    assert np.all(np.abs(b.directions @ b.base) < 1e-10)
