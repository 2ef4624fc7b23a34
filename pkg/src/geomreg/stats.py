"""Riemannian normal distribution, Frechet means and the data log-likelihood.

The density is proportional to ``exp(-tau * d(y, mu)**2 / 2)``.  On the
unit sphere S^m the normalizing constant only depends on ``tau``:

    C(tau) = A_{m-1} * integral_0^pi exp(-tau r^2 / 2) sin(r)^(m-1) dr

which is evaluated by Gauss-Legendre quadrature in log space so that large
``tau`` and high dimensions neither underflow nor overflow.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, ValidationError
from .manifolds import Euclidean, Sphere, log_sphere_area


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss-Legendre rule over the radial interval [0, pi].

    With ``truncate`` set, the interval is shortened to where the integrand
    is still above ``exp(-72)`` of its peak; the radial integrand becomes
    sharply peaked for large precision and a fixed rule on [0, pi] would
    miss it.
    """

    node_count: int = 128
    rule: str = "gauss-legendre"
    truncate: bool = True

    def __post_init__(self):
        if self.node_count < 16:
            raise ValidationError("quadrature needs at least 16 nodes")
        if self.rule != "gauss-legendre":
            raise ValidationError(f"unsupported quadrature rule {self.rule!r}")


DEFAULT_QUAD = QuadratureConfig()


@functools.lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _radial_upper(m, tau, truncate):
    if not truncate or tau <= 0.0:
        return math.pi
    return min(math.pi, (math.sqrt(max(m - 1, 0)) + 12.0) / math.sqrt(tau))


def _radial_log_terms(m, tau, quad):
    """Nodes and log-weights of the radial integrand on S^m."""
    upper = _radial_upper(m, tau, quad.truncate)
    x, w = _leggauss(quad.node_count)
    r = 0.5 * upper * (x + 1.0)
    logw = np.log(0.5 * upper * w) - 0.5 * tau * r * r
    if m > 1:
        logw = logw + (m - 1) * np.log(np.sin(r))
    return r, logw


def _logsumexp(a):
    top = np.max(a)
    return top + math.log(np.sum(np.exp(a - top)))


@functools.lru_cache(maxsize=4096)
def _sphere_log_c(m, tau, quad):
    _, logw = _radial_log_terms(m, tau, quad)
    return log_sphere_area(m - 1) + _logsumexp(logw)


@functools.lru_cache(maxsize=4096)
def _sphere_dlog_c(m, tau, quad):
    r, logw = _radial_log_terms(m, tau, quad)
    wts = np.exp(logw - np.max(logw))
    return -float(np.sum(0.5 * r * r * wts) / np.sum(wts))


def _check_tau(manifold, tau):
    tau = float(tau)
    if not math.isfinite(tau):
        raise DomainError("precision must be finite")
    if isinstance(manifold, Euclidean):
        if tau <= 0.0:
            raise DomainError("precision must be positive on Euclidean space")
    elif tau < 0.0:
        raise DomainError("precision must be non-negative")
    return tau


def log_normalizing_constant(manifold, tau, quad=DEFAULT_QUAD):
    """``ln C(tau)``.  The mean never enters: both manifold families are homogeneous."""
    tau = _check_tau(manifold, tau)
    if isinstance(manifold, Euclidean):
        return 0.5 * manifold.dim * math.log(2.0 * math.pi / tau)
    if isinstance(manifold, Sphere):
        return _sphere_log_c(manifold.dim, tau, quad)
    raise ValidationError(f"no normalizing constant for {manifold!r}")


def normalizing_constant(manifold, tau, quad=DEFAULT_QUAD):
    return math.exp(log_normalizing_constant(manifold, tau, quad))


def dlog_normalizing_constant(manifold, tau, quad=DEFAULT_QUAD):
    """``C'(tau) / C(tau)``, i.e. minus half the expected squared radius."""
    tau = _check_tau(manifold, tau)
    if isinstance(manifold, Euclidean):
        return -0.5 * manifold.dim / tau
    if isinstance(manifold, Sphere):
        return _sphere_dlog_c(manifold.dim, tau, quad)
    raise ValidationError(f"no normalizing constant for {manifold!r}")


def normalizing_constant_dtau(manifold, tau, quad=DEFAULT_QUAD):
    """Derivative of the normalizing constant with respect to the precision."""
    return (normalizing_constant(manifold, tau, quad)
            * dlog_normalizing_constant(manifold, tau, quad))


def expected_squared_distance(manifold, tau, quad=DEFAULT_QUAD):
    """E[d(y, mu)^2] under the Riemannian normal with precision ``tau``."""
    return -2.0 * dlog_normalizing_constant(manifold, tau, quad)


# sampling -------------------------------------------------------------------

def _radial_log_density(r, m, tau):
    out = -0.5 * tau * r * r
    if m > 1:
        with np.errstate(divide="ignore"):
            out = out + (m - 1) * np.log(np.sin(r))
    return out


def _radial_mode(m, tau):
    """Maximizer of the (log-concave) radial density on [0, pi]."""
    if m <= 1:
        return 0.0
    lo, hi = 0.0, np.pi
    # sign of (m - 1) cos r - tau r sin r matches the log-density slope
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if (m - 1) * math.cos(mid) - tau * mid * math.sin(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sample_radii(m, tau, size, rng):
    """Draw ``size`` radii on [0, pi] with density ~ exp(-tau r^2/2) sin(r)^(m-1)."""
    out = np.empty(size)
    filled = 0
    # Envelope: r^(m-1) exp(-tau r^2 / 2), a scaled chi law, when it is
    # concentrated; otherwise a uniform law on [0, pi] scaled to the peak.
    use_chi = tau > 0.0 and math.sqrt(m / tau) < 1.0
    if not use_chi:
        log_peak = float(_radial_log_density(np.array([_radial_mode(m, tau)]), m, tau)[0])
    while filled < size:
        batch = max(64, 2 * (size - filled))
        if use_chi:
            r = np.sqrt(rng.chisquare(m, batch) / tau)
            inside = r < np.pi
            ratio = np.ones(batch)
            if m > 1:
                safe = np.where(inside & (r > 0.0), r, 1.0)
                ratio = np.where(inside, (np.sin(safe) / safe) ** (m - 1), 0.0)
            accept = inside & (rng.random(batch) < ratio)
        else:
            r = np.pi * rng.random(batch)
            accept = np.log(rng.random(batch)) < _radial_log_density(r, m, tau) - log_peak
        r = r[accept][: size - filled]
        out[filled:filled + r.size] = r
        filled += r.size
    return out


@dataclass(frozen=True)
class RiemannianNormal:
    """Normal law on a manifold with mean ``mean`` and precision ``precision``."""

    manifold: object
    mean: np.ndarray
    precision: float

    def __post_init__(self):
        if not self.precision >= 0.0:
            raise ValidationError("precision must be non-negative")
        if isinstance(self.manifold, Euclidean) and self.precision == 0.0:
            raise ValidationError("precision must be positive on Euclidean space")

    def sample(self, rng, size=None):
        return sample(self, rng, size)

    def log_pdf(self, y, quad=DEFAULT_QUAD):
        d = self.manifold.dist(self.mean, y)
        return (-log_normalizing_constant(self.manifold, self.precision, quad)
                - 0.5 * self.precision * d * d)


def sample(dist, rng, size=None):
    """Draw from ``dist`` with an explicitly seeded ``numpy.random.Generator``.

    Sphere: uniform direction in the tangent space at the mean and a radius
    drawn by rejection sampling, mapped through the exponential map.
    """
    man = dist.manifold
    mu = np.asarray(dist.mean, float)
    n = 1 if size is None else int(size)
    if isinstance(man, Euclidean):
        out = mu + rng.standard_normal((n, man.dim)) / math.sqrt(dist.precision)
        return out[0] if size is None else out
    basis = man.tangent_basis(mu)
    coef = rng.standard_normal((n, basis.shape[0]))
    coef /= np.linalg.norm(coef, axis=1, keepdims=True)
    r = _sample_radii(man.dim, float(dist.precision), n, rng)
    vel = man.proj(mu, (r[:, None] * coef) @ basis)
    # radii are strictly below pi but rounding in the projection can nudge them up
    nrm = np.linalg.norm(vel, axis=1)
    over = nrm >= np.pi
    if np.any(over):
        vel[over] *= (np.pi * (1 - 1e-15) / nrm[over])[:, None]
    out = man.exp(mu, vel)
    return out[0] if size is None else out


# Frechet mean -----------------------------------------------------------------

def frechet_mean(manifold, points, tol=1e-10, max_iter=200):
    """Karcher/Frechet mean by the averaged-log fixed-point iteration."""
    pts = np.atleast_2d(np.asarray(points, float))
    if pts.shape[0] == 0:
        raise ValidationError("Frechet mean of an empty set")
    manifold._check_dim(pts)
    if isinstance(manifold, Euclidean):
        return pts.mean(axis=0)
    mu = pts.mean(axis=0)
    nrm = np.linalg.norm(mu)
    mu = pts[0].copy() if nrm < 1e-8 else mu / nrm
    for _ in range(max_iter):
        step = manifold.log(mu, pts).mean(axis=0)
        if np.linalg.norm(step) < tol:
            return mu
        mu = manifold.exp(mu, step)
    step = manifold.log(mu, pts).mean(axis=0)
    if np.linalg.norm(step) < tol:
        return mu
    raise ConvergenceError(
        f"Frechet mean did not converge in {max_iter} iterations "
        f"(update norm {np.linalg.norm(step):.3g})", last=mu)


def log_likelihood(model, data, quad=DEFAULT_QUAD):
    """``-N ln C(tau) - tau/2 * sum_n d(y_n, predict(x_n))^2`` for a fitted model."""
    if model.manifold != data.manifold:
        raise ValidationError("model and data live on different manifolds")
    n = len(data)
    if n == 0:
        return 0.0
    yhat = model.predict(data.X)
    d = model.manifold.dist(yhat, data.Y)
    bad = np.flatnonzero(np.sum(yhat * data.Y, axis=-1) < -1.0 + 1e-9) \
        if isinstance(model.manifold, Sphere) else []
    if len(bad):
        raise DomainError(f"record {int(bad[0])} sits at the cut locus of its prediction")
    return (-n * log_normalizing_constant(model.manifold, model.tau, quad)
            - 0.5 * model.tau * float(np.sum(d * d)))
