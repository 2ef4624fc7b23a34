import numpy as np

from geomreg.manifolds import Sphere
from geomreg.regression import Dataset, GeodesicModel
from geomreg.shapes import generate_sphere_dataset


def sphere_problem(seed, d=3, q=2, n=30, tau=50.0, scale=0.3, alphas=None):
    """Random geodesic model on S^{d-1} plus data drawn around it."""
    S = Sphere(d)
    rng = np.random.default_rng(seed)
    mu = S.random_point(rng)
    cols = S.proj(mu, rng.standard_normal((q, d)))
    cols *= scale / np.linalg.norm(cols, axis=1, keepdims=True)
    data = generate_sphere_dataset(mu, cols, tau, n, seed + 1000, S)
    # perturb so the evaluation point is not the optimum
    mu2 = S.exp(mu, S.random_tangent(mu, rng, 0.05))
    cols2 = S.proj(mu2, cols + 0.05 * rng.standard_normal(cols.shape))
    a = rng.uniform(0.5, 5.0, q) if alphas is None else alphas
    model = GeodesicModel(S, mu2, cols2, tau * rng.uniform(0.5, 1.5), a, np.ones(q, bool),
                          np.zeros(q), np.ones(q))
    return model, data


def euclidean_problem(seed, d=3, q=2, n=40, noise=0.3):
    from geomreg.manifolds import Euclidean
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, q))
    B = rng.standard_normal((q, d))
    b0 = rng.standard_normal(d)
    Y = b0 + X @ B + noise * rng.standard_normal((n, d))
    return Dataset(X, Y, Euclidean(d))


def ols_oracle(X, Y):
    """Normal equations solved explicitly."""
    A = np.hstack([np.ones((X.shape[0], 1)), X])
    B = np.linalg.solve(A.T @ A, A.T @ Y)
    return B[0], B[1:]
