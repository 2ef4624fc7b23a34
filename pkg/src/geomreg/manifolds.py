"""Geometry of the supported manifolds: flat space and unit spheres.

Points and tangent vectors are plain numpy arrays in ambient coordinates.
Every map broadcasts over leading axes, so ``exp(p, v)`` accepts a single
point and a stack of velocities, a stack of both, and so on.

The sphere formulas are the unit-curvature closed forms.  The adjoint
differentials of the exponential map come from Jacobi fields: along a
geodesic of speed ``t`` the component parallel to the velocity is carried
unchanged, while orthogonal components are scaled by ``cos t`` (base point
variation) or ``sin t / t`` (initial velocity variation).
"""

import math

import numpy as np

from .errors import ContractError, DomainError, ValidationError

#: ``<p, q>`` below this is treated as antipodal.
ANTIPODAL_TOL = -1.0 + 1e-9
#: Hard tolerance on ``<p, v>`` for a vector to count as tangent.
TANGENT_TOL = 1e-10
UNIT_TOL = 1e-12


def _inner(a, b):
    return np.sum(a * b, axis=-1)


def _norm(a):
    return np.sqrt(np.sum(a * a, axis=-1))


class Manifold:
    """Common interface.  Subclasses fill in the geometry."""

    kind = None

    def __init__(self, ambient_dim):
        ambient_dim = int(ambient_dim)
        if ambient_dim < 1:
            raise ValidationError("ambient dimension must be >= 1")
        self.ambient_dim = ambient_dim

    # identity -----------------------------------------------------------
    @property
    def key(self):
        return (self.kind, self.ambient_dim)

    def __eq__(self, other):
        return isinstance(other, Manifold) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}({self.ambient_dim})"

    # shape helpers ------------------------------------------------------
    def _check_dim(self, *arrays):
        for a in arrays:
            if a.shape[-1] != self.ambient_dim:
                raise ValidationError(
                    f"expected ambient dimension {self.ambient_dim}, got {a.shape[-1]}")

    def inner(self, p, u, w):
        """Riemannian metric; the ambient dot product on every supported manifold."""
        return _inner(np.asarray(u, float), np.asarray(w, float))

    def norm(self, p, v):
        return _norm(np.asarray(v, float))

    def random_point(self, rng, size=None):
        raise NotImplementedError

    def random_tangent(self, p, rng, scale=1.0):
        p = np.asarray(p, float)
        return self.proj(p, scale * rng.standard_normal(p.shape))


class Euclidean(Manifold):
    """Flat space R^d: exp is addition and log is subtraction."""

    kind = "euclidean"

    @property
    def dim(self):
        return self.ambient_dim

    def check_point(self, p):
        p = np.asarray(p, float)
        self._check_dim(p)
        if not np.all(np.isfinite(p)):
            raise ValidationError("point has non-finite coordinates")
        return p

    def proj(self, p, w):
        w = np.asarray(w, float)
        self._check_dim(w)
        return np.broadcast_to(w, np.broadcast_shapes(np.shape(p), w.shape)).copy()

    def exp(self, p, v):
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        self._check_dim(p, v)
        return p + v

    def log(self, p, q):
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        self._check_dim(p, q)
        return q - p

    def dist(self, p, q):
        return _norm(self.log(p, q))

    def transport(self, p, v, w):
        return self.proj(p, w)

    def dexp_base_adjoint(self, p, v, w):
        return self.proj(p, w)

    def dexp_velocity_adjoint(self, p, v, w):
        return self.proj(p, w)

    def tangent_basis(self, p):
        return np.eye(self.ambient_dim)

    def random_point(self, rng, size=None):
        shape = (self.ambient_dim,) if size is None else (size, self.ambient_dim)
        return rng.standard_normal(shape)


class Sphere(Manifold):
    """Unit sphere in R^d (intrinsic dimension d - 1).

    ``exp`` refuses velocities of length >= pi rather than wrapping past
    the cut locus, and ``log`` refuses (near-)antipodal pairs.
    """

    kind = "sphere"

    def __init__(self, ambient_dim):
        super().__init__(ambient_dim)
        if self.ambient_dim < 2:
            raise ValidationError("a sphere needs ambient dimension >= 2")

    @property
    def dim(self):
        return self.ambient_dim - 1

    # constraint handling -------------------------------------------------
    def check_point(self, p, tol=UNIT_TOL):
        p = np.asarray(p, float)
        self._check_dim(p)
        if not np.all(np.isfinite(p)):
            raise ValidationError("point has non-finite coordinates")
        if np.any(np.abs(_norm(p) - 1.0) > tol):
            raise ValidationError("point is not on the unit sphere")
        return p

    def _normal_proj(self, p, w):
        return w - _inner(p, w)[..., None] * p

    def proj(self, p, w):
        """Orthogonal projection of an ambient vector onto the tangent space at ``p``."""
        p = np.asarray(p, float)
        w = np.asarray(w, float)
        self._check_dim(p, w)
        return self._normal_proj(p, w)

    def normalize(self, x):
        x = np.asarray(x, float)
        return x / _norm(x)[..., None]

    def _check_tangent(self, p, v):
        off = np.abs(_inner(p, v))
        if np.any(off > TANGENT_TOL * np.maximum(1.0, _norm(v))):
            raise ContractError(f"vector is not tangent at its base point (|<p,v>| = {off.max():.3g})")

    # maps -----------------------------------------------------------------
    def exp(self, p, v):
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        self._check_dim(p, v)
        self._check_tangent(p, v)
        theta = _norm(v)
        if np.any(theta >= np.pi):
            raise DomainError(
                f"velocity norm {theta.max():.6g} reaches the cut locus (must be < pi)")
        t = theta[..., None]
        out = np.cos(t) * p + np.sinc(t / np.pi) * v
        return out / _norm(out)[..., None]

    def log(self, p, q):
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        self._check_dim(p, q)
        c = _inner(p, q)
        if np.any(c < ANTIPODAL_TOL):
            raise DomainError("log map of (near-)antipodal points is undefined")
        w = q - c[..., None] * p
        s = _norm(w)
        theta = np.arctan2(s, c)
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(s > 0.0, theta / np.where(s > 0.0, s, 1.0), 1.0)
        return self._normal_proj(p, scale[..., None] * w)

    def dist(self, p, q):
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        self._check_dim(p, q)
        # arctan2 keeps full precision for nearby and nearly antipodal pairs alike
        c = _inner(p, q)
        s = _norm(q - c[..., None] * p)
        return np.arctan2(s, c)

    def _frame(self, v):
        theta = _norm(v)
        safe = np.where(theta > 0.0, theta, 1.0)
        return theta, v / safe[..., None]

    def transport(self, p, v, w):
        """Parallel transport of ``w`` from ``p`` to ``exp(p, v)`` along the geodesic."""
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        w = np.asarray(w, float)
        self._check_dim(p, v, w)
        theta, u = self._frame(v)
        a = _inner(w, u)[..., None]
        t = theta[..., None]
        out = w + a * ((np.cos(t) - 1.0) * u - np.sin(t) * p)
        q = self.exp(p, v)
        return self._normal_proj(q, out)

    def _transport_back(self, p, v, w):
        # inverse transport of w (tangent at exp(p, v)) to p; returns (w_back, a, u, theta)
        theta, u = self._frame(v)
        t = theta[..., None]
        u_q = -np.sin(t) * p + np.cos(t) * u
        a = _inner(w, u_q)[..., None]
        back = w + a * (u - u_q)
        return self._normal_proj(p, back), a, u, t

    def dexp_base_adjoint(self, p, v, w):
        """Adjoint of d/dp exp(p, v), applied to ``w`` tangent at ``exp(p, v)``."""
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        w = np.asarray(w, float)
        self._check_dim(p, v, w)
        back, a, u, t = self._transport_back(p, v, w)
        par = a * u
        return par + np.cos(t) * (back - par)

    def dexp_velocity_adjoint(self, p, v, w):
        """Adjoint of d/dv exp(p, v), applied to ``w`` tangent at ``exp(p, v)``."""
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        w = np.asarray(w, float)
        self._check_dim(p, v, w)
        back, a, u, t = self._transport_back(p, v, w)
        par = a * u
        return par + np.sinc(t / np.pi) * (back - par)

    def tangent_basis(self, p):
        """Orthonormal rows spanning the tangent space at ``p``."""
        p = np.asarray(p, float)
        proj = self.proj(p, np.eye(self.ambient_dim))
        u, s, _ = np.linalg.svd(proj)
        return u[:, :self.dim].T

    def random_point(self, rng, size=None):
        shape = (self.ambient_dim,) if size is None else (size, self.ambient_dim)
        return self.normalize(rng.standard_normal(shape))


class PreshapeSphere(Sphere):
    """Centered, unit-norm configurations of ``k`` planar landmarks.

    Points are stored as flattened ``(x0, y0, x1, y1, ...)`` vectors in R^{2k}.
    The centering constraint removes two directions, so the manifold is a
    great sphere of intrinsic dimension ``2k - 3`` inside the unit sphere of
    R^{2k}; all sphere formulas apply unchanged.
    """

    kind = "preshape"

    def __init__(self, k):
        k = int(k)
        if k < 3:
            raise ValidationError("a preshape sphere needs k >= 3 landmarks")
        self.k = k
        super().__init__(2 * k)

    def __repr__(self):
        return f"PreshapeSphere(k={self.k})"

    @property
    def dim(self):
        return 2 * self.k - 3

    def _center(self, w):
        shaped = w.reshape(w.shape[:-1] + (self.k, 2))
        shaped = shaped - shaped.mean(axis=-2, keepdims=True)
        return shaped.reshape(w.shape)

    def check_point(self, p, tol=UNIT_TOL):
        p = super().check_point(p, tol)
        cen = p.reshape(p.shape[:-1] + (self.k, 2)).mean(axis=-2)
        if np.any(np.abs(cen) > tol):
            raise ValidationError("preshape point is not centered")
        return p

    def proj(self, p, w):
        p = np.asarray(p, float)
        w = np.asarray(w, float)
        self._check_dim(p, w)
        return self._normal_proj(p, self._center(w))

    def random_point(self, rng, size=None):
        shape = (self.ambient_dim,) if size is None else (size, self.ambient_dim)
        return self.normalize(self._center(rng.standard_normal(shape)))


def sphere_area(m):
    """Surface area of the unit ``m``-sphere embedded in R^{m+1}."""
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def log_sphere_area(m):
    return math.log(2.0) + (m + 1) / 2.0 * math.log(math.pi) - math.lgamma((m + 1) / 2.0)


def make_manifold(kind, dim=None, k=None):
    """Build a manifold from its tag (``euclidean``, ``sphere`` or ``preshape``)."""
    if kind == "euclidean":
        return Euclidean(dim)
    if kind == "sphere":
        return Sphere(dim)
    if kind == "preshape":
        if k is None and dim is not None:
            if dim % 2:
                raise ValidationError("preshape ambient dimension must be even")
            k = dim // 2
        return PreshapeSphere(k)
    raise ValidationError(f"unknown manifold kind {kind!r}")
