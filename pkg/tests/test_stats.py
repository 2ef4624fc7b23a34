import math

import numpy as np
import pytest
from scipy import integrate, stats as sps

from geomreg.errors import DomainError, ValidationError
from geomreg.manifolds import Euclidean, PreshapeSphere, Sphere, sphere_area
from geomreg.regression import Dataset, GeodesicModel
from geomreg.stats import (QuadratureConfig, RiemannianNormal, dlog_normalizing_constant,
                           expected_squared_distance, frechet_mean, log_likelihood,
                           log_normalizing_constant, normalizing_constant,
                           normalizing_constant_dtau, sample)

S2 = Sphere(3)


def refined_constant(m, tau, tol=1e-10):
    """Gauss-Legendre on the full radial range, doubling nodes until stable."""
    f = lambda r: np.exp(-0.5 * tau * r * r) * np.sin(r) ** (m - 1)
    n, prev = 16, None
    while True:
        x, w = np.polynomial.legendre.leggauss(n)
        r = 0.5 * np.pi * (x + 1)
        val = sphere_area(m - 1) * 0.5 * np.pi * np.sum(w * f(r))
        if prev is not None and abs(val - prev) < tol * abs(val):
            return val
        prev, n = val, 2 * n


def test_constant_uniform_and_gaussian():
    assert abs(normalizing_constant(S2, 0.0) - 4 * np.pi) < 1e-8
    assert normalizing_constant(Euclidean(1), 1.0) == pytest.approx(math.sqrt(2 * math.pi),
                                                                  rel=1e-14)
    assert normalizing_constant(Euclidean(3), 2.0) == pytest.approx(math.pi ** 1.5, rel=1e-14)


@pytest.mark.parametrize("d,tau", [(3, 100.0), (3, 1.0), (6, 10.0), (52, 100.0)])
def test_constant_matches_refinement_oracle(d, tau):
    m = d - 1
    ref = refined_constant(m, tau)
    assert math.exp(log_normalizing_constant(Sphere(d), tau)) == pytest.approx(ref, rel=1e-9)


def test_constant_matches_scipy_quad():
    val, _ = integrate.quad(lambda r: np.exp(-50 * r * r) * np.sin(r), 0, np.pi)
    assert normalizing_constant(S2, 100.0) == pytest.approx(2 * np.pi * val, rel=1e-10)


def test_preshape_constant_uses_intrinsic_dimension():
    P = PreshapeSphere(4)
    assert log_normalizing_constant(P, 3.0) == pytest.approx(
        log_normalizing_constant(Sphere(6), 3.0))


@pytest.mark.parametrize("tau", [1.0, 10.0, 100.0])
def test_dtau_matches_finite_difference(tau):
    h = 1e-4 * tau
    fd = (normalizing_constant(S2, tau + h) - normalizing_constant(S2, tau - h)) / (2 * h)
    assert normalizing_constant_dtau(S2, tau) == pytest.approx(fd, rel=1e-6)
    assert normalizing_constant_dtau(S2, tau) < 0.0


def test_dtau_euclidean_closed_form():
    assert normalizing_constant_dtau(Euclidean(2), 1.0) == pytest.approx(-2 * np.pi)
    assert dlog_normalizing_constant(Euclidean(5), 2.0) == pytest.approx(-5 / 4)
    assert expected_squared_distance(Euclidean(5), 2.0) == pytest.approx(2.5)


def test_tau_domain():
    with pytest.raises(DomainError):
        normalizing_constant(Euclidean(2), 0.0)
    with pytest.raises(DomainError):
        normalizing_constant(S2, -1.0)
    with pytest.raises(ValidationError):
        QuadratureConfig(node_count=8)


def test_sample_concentrates():
    rng = np.random.default_rng(0)
    mu = S2.normalize(np.array([0.3, -0.2, 0.9]))
    ys = sample(RiemannianNormal(S2, mu, 1e6), rng, 10_000)
    assert S2.dist(mu, ys).mean() < 0.01


def test_sample_uniform_at_zero_precision():
    rng = np.random.default_rng(1)
    mu = E = np.array([0.0, 0.0, 1.0])
    ys = sample(RiemannianNormal(S2, mu, 0.0), rng, 100_000)
    stat = sps.kstest(ys @ E, sps.uniform(loc=-1, scale=2).cdf).statistic
    assert stat < 0.01


def test_sample_deterministic():
    dist = RiemannianNormal(Sphere(5), np.eye(5)[0], 20.0)
    a = sample(dist, np.random.default_rng(9), 50)
    b = sample(dist, np.random.default_rng(9), 50)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("d,tau", [(3, 4.0), (3, 0.5), (52, 50.0), (52, 200.0)])
def test_sample_radial_law_matches_expected_distance(d, tau):
    S = Sphere(d)
    rng = np.random.default_rng(5)
    mu = np.eye(d)[0]
    ys = sample(RiemannianNormal(S, mu, tau), rng, 100_000)
    emp = np.mean(S.dist(mu, ys) ** 2)
    assert emp == pytest.approx(expected_squared_distance(S, tau), rel=0.01)


def test_frechet_mean_trivial_cases():
    p = S2.normalize(np.array([1.0, 2.0, 3.0]))
    assert np.allclose(frechet_mean(S2, np.array([p, p, p])), p)
    q = S2.normalize(np.array([-1.0, 2.0, 0.5]))
    m = frechet_mean(S2, np.array([p, q]))
    assert abs(S2.dist(m, p) - S2.dist(m, q)) < 1e-8


def _fibonacci(n):
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (1 + 5 ** 0.5) * i
    r = np.sqrt(1 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _grid_search_mean(Y):
    cost = lambda P: np.sum(S2.dist(P[:, None, :], Y[None]) ** 2, axis=1)
    grid = _fibonacci(2000)
    best = grid[np.argmin(cost(grid))]
    radius = 0.1
    for _ in range(25):
        T = S2.tangent_basis(best)
        a = np.linspace(-radius, radius, 21)
        U = (a[:, None, None] * T[0] + a[None, :, None] * T[1]).reshape(-1, 3)
        cand = S2.exp(best, U)
        best = cand[np.argmin(cost(cand))]
        radius *= 0.3
    return best


def test_frechet_mean_matches_grid_search():
    rng = np.random.default_rng(20)
    c = S2.normalize(np.array([0.2, 0.5, 0.8]))
    Y = sample(RiemannianNormal(S2, c, 5.0), rng, 20)
    assert S2.dist(frechet_mean(S2, Y), _grid_search_mean(Y)) < 1e-6


def test_log_likelihood_examples():
    mu = np.eye(3)[0]
    model = GeodesicModel(S2, mu, [[0, 0.3, 0]], 10.0, [0.0], [True], [0.0], [1.0])
    empty = Dataset(np.zeros((0, 1)), np.zeros((0, 3)), S2)
    assert log_likelihood(model, empty) == 0.0
    X = np.array([[0.0], [0.5], [1.0]])
    exact = Dataset(X, model.predict(X), S2)
    assert log_likelihood(model, exact) == pytest.approx(
        -3 * log_normalizing_constant(S2, 10.0), rel=1e-13)


def test_log_likelihood_euclidean_matches_gaussian():
    rng = np.random.default_rng(2)
    E = Euclidean(3)
    X = rng.standard_normal((25, 2))
    Y = rng.standard_normal((25, 3))
    model = GeodesicModel(E, [0.1, 0.2, 0.3], rng.standard_normal((2, 3)), 2.5, [0, 0],
                          [True, True], [0, 0], [1, 1])
    mean = model.predict(X)
    ref = np.sum(sps.norm(mean, 1 / np.sqrt(2.5)).logpdf(Y))
    assert log_likelihood(model, Dataset(X, Y, E)) == pytest.approx(ref, abs=1e-10)
