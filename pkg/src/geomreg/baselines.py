"""Comparison methods: least squares, Bayesian linear regression with ARD,
PCA and tangent-space PGA."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .manifolds import Euclidean
from .regression import FitConfig, alpha_numerator, _standardization
from .stats import frechet_mean


@dataclass
class LinearModel:
    """``y = intercept + slopes.T @ x + noise``; ``slopes`` has one row per covariate."""

    intercept: np.ndarray
    slopes: np.ndarray
    precision: float
    alphas: np.ndarray
    active: np.ndarray = None

    def __post_init__(self):
        self.intercept = np.asarray(self.intercept, float)
        self.slopes = np.atleast_2d(np.asarray(self.slopes, float))
        self.alphas = np.asarray(self.alphas, float)
        if self.active is None:
            self.active = np.ones(self.slopes.shape[0], bool)
        if not self.precision > 0.0:
            raise ValidationError("precision must be positive")

    @property
    def manifold(self):
        return Euclidean(self.intercept.shape[0])

    @property
    def q(self):
        return self.slopes.shape[0]

    def predict(self, X):
        X = np.asarray(X, float)
        single = X.ndim == 0 or (X.ndim == 1 and (self.q > 1 or X.size == 1))
        X2 = X.reshape(1, -1) if single else (X[:, None] if X.ndim == 1 else X)
        out = self.intercept + X2 @ self.slopes
        return out[0] if single else out


def _design(data):
    if data.X.shape[0] < 2:
        raise ValidationError("need at least two records")
    A = np.hstack([np.ones((len(data), 1)), data.X])
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise ValidationError("singular design: covariates are degenerate")
    return A


def fit_ols(data):
    """Closed-form least squares; ``precision = N d / sum |r|^2``."""
    A = _design(data)
    B, *_ = np.linalg.lstsq(A, data.Y, rcond=None)
    r = data.Y - A @ B
    sse = float(np.sum(r * r))
    n, d = data.Y.shape
    tau = n * d / sse if sse > 0.0 else np.inf
    return LinearModel(B[0], B[1:], tau, np.zeros(data.X.shape[1]))


def fit_blr_ard(data, cfg=None, max_iter=10000):
    """Bayesian linear regression with one ARD precision per slope column.

    Alternates the ridge solve for (intercept, slopes) given the precisions,
    the noise precision update and ``alpha_i = n / |v_i|^2``.  Columns whose
    precision crosses ``cfg.prune_threshold`` are removed; the largest column
    is always kept.  With ``covariate_standardization`` the penalty acts on
    standardized slopes and the result is mapped back to raw units.
    """
    cfg = cfg or FitConfig()
    _design(data)
    X, Y = data.X, data.Y
    n, d = Y.shape
    q = X.shape[1]
    mean, scale = _standardization(X, cfg.covariate_standardization)
    Z = (X - mean) / scale
    A = np.hstack([np.ones((n, 1)), Z])
    n_alpha = alpha_numerator(Euclidean(d), n, cfg)

    B, *_ = np.linalg.lstsq(A, Y, rcond=None)
    active = np.ones(q, bool)

    def noise_precision(B):
        r = Y - A @ B
        sse = float(np.sum(r * r))
        return min(n * d / sse, cfg.tau_max) if sse > 0.0 else cfg.tau_max

    def precisions(B):
        sq = np.sum(B[1:] ** 2, axis=1)
        return np.where(active, np.minimum(n_alpha / np.maximum(sq, 1e-12), cfg.alpha_cap),
                        cfg.alpha_cap)

    tau = noise_precision(B)
    alphas = precisions(B)
    for _ in range(max_iter):
        cols = np.concatenate([[True], active])
        Aa = A[:, cols]
        H = tau * Aa.T @ Aa + np.diag(np.concatenate([[0.0], alphas[active]]))
        B_new = np.zeros_like(B)
        B_new[cols] = np.linalg.solve(H, tau * Aa.T @ Y)
        tau = noise_precision(B_new)
        alphas = precisions(B_new)

        norms = np.linalg.norm(B_new[1:], axis=1)
        cand = active & ((alphas >= cfg.prune_threshold)
                         | (norms <= 1e-6 * norms[active].max()))
        if cand.sum() == active.sum():
            cand[np.flatnonzero(active)[np.argmax(norms[active])]] = False
        if cand.any():
            active = active & ~cand
            B_new[1:][cand] = 0.0
            alphas[cand] = cfg.alpha_cap

        change = np.max(np.abs(B_new - B))
        B = B_new
        if change <= 1e-13 * max(1.0, np.max(np.abs(B))) and not cand.any():
            break

    slopes = B[1:] / scale[:, None]
    intercept = B[0] - mean @ slopes
    return LinearModel(intercept, slopes, tau, alphas, active)


@dataclass
class PrincipalBasis:
    """Mean, orthonormal principal directions (rows) and their variances."""

    base: np.ndarray
    directions: np.ndarray
    variances: np.ndarray


def _orient(vecs):
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(vecs), axis=1)
    signs = np.sign(vecs[np.arange(len(vecs)), idx])
    signs[signs == 0] = 1.0
    return vecs * signs[:, None]


def fit_pca(points, r):
    """Top-``r`` eigenpairs of the sample covariance (divisor N - 1)."""
    P = np.atleast_2d(np.asarray(points, float))
    n, d = P.shape
    if n < 2:
        raise ValidationError("PCA needs at least two points")
    if not 1 <= r <= d:
        raise ValidationError(f"r must be in [1, {d}]")
    mean = P.mean(axis=0)
    C = np.cov(P - mean, rowvar=False).reshape(d, d)
    w, U = np.linalg.eigh(C)
    order = np.argsort(w)[::-1][:r]
    return PrincipalBasis(mean, _orient(U[:, order].T), np.maximum(w[order], 0.0))


def fit_tangent_pga(manifold, points, r):
    """PCA of the log-mapped points in the tangent space at their Frechet mean.

    This is the usual linearized stand-in for exact principal geodesic
    analysis.
    """
    P = np.atleast_2d(np.asarray(points, float))
    mean = frechet_mean(manifold, P)
    if isinstance(manifold, Euclidean):
        basis = fit_pca(P, r)
        return PrincipalBasis(mean, basis.directions, basis.variances)
    if not 1 <= r <= manifold.dim:
        raise ValidationError(f"r must be in [1, {manifold.dim}]")
    T = manifold.tangent_basis(mean)
    coords = manifold.log(mean, P) @ T.T
    basis = fit_pca(coords, r)
    dirs = manifold.proj(mean, basis.directions @ T)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return PrincipalBasis(mean, _orient(dirs), basis.variances)
