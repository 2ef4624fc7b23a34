"""Planar landmark shapes on the preshape sphere, plus synthetic generators.

Rotation is removed once, up front, by generalized Procrustes alignment;
what remains (translation and scale quotiented out) lives on a constant
curvature sphere where all regression formulas are exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .manifolds import PreshapeSphere, Sphere
from .regression import Dataset, GeodesicModel, predict
from .stats import RiemannianNormal, sample


@dataclass
class LandmarkShape:
    points: np.ndarray
    covariate: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.points = np.asarray(self.points, float)
        self.covariate = np.atleast_1d(np.asarray(self.covariate, float))
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValidationError("landmarks must be a k x 2 array")
        if self.points.shape[0] < 3:
            raise ValidationError("a shape needs at least 3 landmarks")
        if not np.all(np.isfinite(self.points)):
            raise ValidationError("landmarks must be finite")

    @property
    def k(self):
        return self.points.shape[0]


@dataclass
class ShapeSet:
    shapes: list
    covariate_names: tuple = ()

    def __post_init__(self):
        if not self.shapes:
            raise ValidationError("empty shape set")
        ks = {s.k for s in self.shapes}
        if len(ks) != 1:
            raise ValidationError("all shapes must have the same number of landmarks")
        qs = {s.covariate.shape[0] for s in self.shapes}
        if len(qs) != 1:
            raise ValidationError("all shapes must have the same covariate length")
        q = qs.pop()
        names = tuple(self.covariate_names) or tuple(f"x{i + 1}" for i in range(q))
        if len(names) != q:
            raise ValidationError("one name per covariate is required")
        self.covariate_names = names

    @property
    def k(self):
        return self.shapes[0].k

    def __len__(self):
        return len(self.shapes)

    @property
    def covariates(self):
        return np.array([s.covariate for s in self.shapes])


def _points(shape):
    return shape.points if isinstance(shape, LandmarkShape) else np.asarray(shape, float)


def to_preshape(shape):
    """Center, scale to unit Frobenius norm and flatten row-major."""
    P = _points(shape)
    if P.ndim != 2 or P.shape[1] != 2 or P.shape[0] < 3:
        raise ValidationError("landmarks must be a k x 2 array with k >= 3")
    C = P - P.mean(axis=0)
    nrm = np.linalg.norm(C)
    if nrm <= 1e-12:
        raise ValidationError("degenerate shape: all landmarks coincide")
    return (C / nrm).ravel()


def from_preshape(p, k, covariate=()):
    p = np.asarray(p, float)
    if p.shape != (2 * k,):
        raise ValidationError(f"expected a vector of length {2 * k}, got shape {p.shape}")
    return LandmarkShape(p.reshape(k, 2).copy(), covariate)


def rotation_to(A, B):
    """Rotation R (2 x 2, det +1) minimizing |A @ R - B| for centered k x 2 arrays."""
    U, _, Vt = np.linalg.svd(A.T @ B)
    D = np.diag([1.0, np.sign(np.linalg.det(U @ Vt)) or 1.0])
    return U @ D @ Vt


def rotation_angle(R):
    return float(np.arctan2(R[0, 1], R[0, 0]))


def procrustes_align(shapes, tol=1e-10, max_iter=500):
    """Generalized Procrustes alignment onto a common mean.

    The mean's own rotation is pinned by matching it to the first shape, so
    aligning an already aligned set is a no-op.
    """
    Z = np.array([to_preshape(s).reshape(-1, 2) for s in shapes.shapes])
    mean = Z[0]
    for _ in range(max_iter):
        aligned = np.array([z @ rotation_to(z, mean) for z in Z])
        new = aligned.mean(axis=0)
        new /= np.linalg.norm(new)
        new = new @ rotation_to(new, Z[0])
        change = np.linalg.norm(new - mean)
        mean = new
        if change < tol:
            break
    aligned = np.array([z @ rotation_to(z, mean) for z in Z])
    out = [LandmarkShape(a, s.covariate) for a, s in zip(aligned, shapes.shapes)]
    return ShapeSet(out, shapes.covariate_names)


def shapes_to_dataset(shapes, align=True):
    """Preshape-sphere dataset from a shape set (aligned first by default)."""
    if align:
        shapes = procrustes_align(shapes)
    Y = np.array([to_preshape(s) for s in shapes.shapes])
    return Dataset(shapes.covariates, Y, PreshapeSphere(shapes.k), shapes.covariate_names)


def dataset_to_shapes(data):
    k = data.manifold.ambient_dim // 2
    return ShapeSet([from_preshape(y, k, x) for x, y in zip(data.X, data.Y)],
                    data.covariate_names)


# generators -------------------------------------------------------------------

PENTAGON_LANDMARKS = 26
SHRINK_RATE = 0.02
BEND_RATE = 0.006
FLATTEN = 0.5
# per-vertex angular drift pattern; vertex 0 stays put
_BEND = np.array([0.0, 1.0, 0.5, -0.5, -1.0])


def pentagon_outline(x=0.0, n_landmarks=PENTAGON_LANDMARKS):
    """Pentagon outline at covariate ``x``, sampled at equal arc-length steps.

    The outline shrinks as ``1 / (1 + 0.02 x)``, its vertices drift around
    the circumcircle in proportion to ``x`` and the apex flattens towards
    the centre quadratically, ``1 - 0.5 (x / 50)^2``.  Only the drift and
    the flattening survive the similarity quotient.
    """
    ang = np.pi / 2 + 2 * np.pi * np.arange(5) / 5 + BEND_RATE * x * _BEND
    rad = np.ones(5)
    rad[0] -= FLATTEN * (x / 50.0) ** 2
    verts = rad[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    closed = np.vstack([verts, verts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.arange(n_landmarks) * cum[-1] / n_landmarks
    idx = np.searchsorted(cum, s, side="right") - 1
    t = (s - cum[idx]) / seg[idx]
    pts = closed[idx] + t[:, None] * (closed[idx + 1] - closed[idx])
    return pts / (1.0 + SHRINK_RATE * x)


def generate_pentagons(n=50, noise=0.01, seed=0, n_landmarks=PENTAGON_LANDMARKS):
    """Shapes for ``x = 1..n`` with isotropic landmark noise of ``noise`` times the size."""
    if n < 2:
        raise ValidationError("need at least two pentagons")
    if noise < 0.0:
        raise ValidationError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    shapes = []
    for x in range(1, n + 1):
        pts = pentagon_outline(x, n_landmarks)
        size = 1.0 / (1.0 + SHRINK_RATE * x)
        pts = pts + noise * size * rng.standard_normal(pts.shape)
        shapes.append(LandmarkShape(pts, [float(x)]))
    return ShapeSet(shapes, ("x",))


def generate_sphere_dataset(mu, columns, tau, n, seed, manifold=None):
    """Covariates uniform on [0, 1]^q, responses Riemannian-normal around the geodesic."""
    mu = np.asarray(mu, float)
    manifold = manifold or Sphere(mu.shape[0])
    columns = np.atleast_2d(np.asarray(columns, float))
    q = columns.shape[0]
    truth = GeodesicModel(manifold, mu, columns, tau, np.zeros(q), np.ones(q, bool),
                          np.zeros(q), np.ones(q), mode="geodesic")
    rng = np.random.default_rng(seed)
    X = rng.random((n, q))
    centers = predict(truth, X)
    Y = np.array([sample(RiemannianNormal(manifold, c, tau), rng) for c in centers])
    return Dataset(X, Y, manifold)
