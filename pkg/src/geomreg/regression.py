"""Geodesic regression with an automatic-relevance-determination prior.

Model: ``y_n ~ N_M(Exp(mu, sum_i z_ni v_i), 1/tau)`` where ``z_n`` are the
(optionally standardized, optionally basis-expanded) covariates and each
``v_i`` is a tangent vector at ``mu``.  Three fitting modes share one
optimizer:

``geodesic``
    maximum likelihood.
``regularized``
    adds ``-(gamma * tau / 2) * sum_i |v_i|^2``, i.e. the ridge-penalized
    least-squares energy scaled by ``tau``.
``bgrm``
    MAP under ``v_i ~ N(0, 1/alpha_i)``; the ``alpha_i`` are re-estimated
    every iteration and columns whose precision explodes are pruned.

All gradients are ascent directions of the log posterior and are validated
against finite differences in the test suite.
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, DomainError, ValidationError
from .manifolds import Euclidean, Sphere
from .stats import DEFAULT_QUAD, dlog_normalizing_constant, frechet_mean, log_normalizing_constant

MODES = ("geodesic", "regularized", "bgrm")
EPS_DIV = 1e-12


# data containers ------------------------------------------------------------

@dataclass
class Dataset:
    """Paired covariates ``X`` (N x p) and manifold-valued responses ``Y`` (N x D)."""

    X: np.ndarray
    Y: np.ndarray
    manifold: object
    covariate_names: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.X, float)
        if X.ndim == 1:
            X = X[:, None]
        Y = np.atleast_2d(np.asarray(self.Y, float))
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
            raise ValidationError(f"inconsistent dataset shapes X{X.shape} Y{Y.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValidationError("dataset contains non-finite values")
        if len(Y):
            self.manifold.check_point(Y)
        names = tuple(self.covariate_names) or tuple(f"x{i + 1}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValidationError("one covariate name per covariate column is required")
        self.X, self.Y, self.covariate_names = X, Y, names

    def __len__(self):
        return self.X.shape[0]

    def permuted(self, perm):
        """Same responses, covariate rows reordered by ``perm``."""
        return Dataset(self.X[perm], self.Y, self.manifold, self.covariate_names)


@dataclass(frozen=True)
class PolynomialBasis:
    """Legendre polynomials P_1..P_degree of a scalar covariate mapped to [-1, 1]."""

    degree: int
    lower: float
    upper: float

    def __post_init__(self):
        if self.degree < 1:
            raise ValidationError("basis degree must be >= 1")
        if not self.upper > self.lower:
            raise ValidationError("basis domain must have positive width")

    @classmethod
    def for_covariate(cls, x, degree):
        x = np.asarray(x, float).ravel()
        return cls(int(degree), float(x.min()), float(x.max()))

    input_dim = 1

    def expand(self, X):
        X = np.asarray(X, float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValidationError("polynomial basis expects a single covariate")
            X = X[:, 0]
        t = 2.0 * (X - self.lower) / (self.upper - self.lower) - 1.0
        cols = np.polynomial.legendre.legvander(t, self.degree)[..., 1:]
        return cols

    def to_dict(self):
        return {"kind": "legendre", "degree": self.degree, "lower": self.lower, "upper": self.upper}

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "legendre":
            raise ValidationError(f"unknown basis kind {d.get('kind')!r}")
        return cls(int(d["degree"]), float(d["lower"]), float(d["upper"]))


@dataclass
class GeodesicModel:
    """Regression state.

    ``columns`` holds the q tangent vectors at ``mu`` as rows.  They act on
    covariates transformed by ``z = (basis(x) - x_mean) / x_scale``, so with
    standardization off and no basis ``predict(model, 0) == mu``.
    """

    manifold: object
    mu: np.ndarray
    columns: np.ndarray
    tau: float
    alphas: np.ndarray
    active: np.ndarray
    x_mean: np.ndarray
    x_scale: np.ndarray
    basis: PolynomialBasis = None
    mode: str = "bgrm"
    gamma: float = 0.0

    def __post_init__(self):
        self.mu = np.asarray(self.mu, float)
        self.columns = np.atleast_2d(np.asarray(self.columns, float))
        q = self.columns.shape[0]
        self.alphas = np.broadcast_to(np.asarray(self.alphas, float), (q,)).copy()
        self.active = np.broadcast_to(np.asarray(self.active, bool), (q,)).copy()
        self.x_mean = np.broadcast_to(np.asarray(self.x_mean, float), (q,)).copy()
        self.x_scale = np.broadcast_to(np.asarray(self.x_scale, float), (q,)).copy()
        self.tau = float(self.tau)
        if self.columns.shape[1] != self.mu.shape[-1]:
            raise ValidationError("columns and base point dimensions differ")
        if not self.tau > 0.0:
            raise ValidationError("tau must be positive")
        if np.any(self.alphas < 0.0):
            raise ValidationError("ARD precisions must be non-negative")
        if np.any(self.x_scale <= 0.0):
            raise ValidationError("covariate scales must be positive")
        if np.any(self.columns[~self.active] != 0.0):
            raise ValidationError("inactive columns must be exactly zero")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}")

    @property
    def q(self):
        return self.columns.shape[0]

    @property
    def input_dim(self):
        return self.basis.input_dim if self.basis is not None else self.q

    def copy(self, **changes):
        out = replace(self, mu=self.mu.copy(), columns=self.columns.copy(),
                      alphas=self.alphas.copy(), active=self.active.copy(),
                      x_mean=self.x_mean.copy(), x_scale=self.x_scale.copy())
        for k, v in changes.items():
            setattr(out, k, v)
        return out

    def design(self, X):
        """Covariates as seen by the columns: basis-expanded, then standardized."""
        X = np.asarray(X, float)
        if X.ndim == 1:
            X = X[:, None] if self.input_dim == 1 else X[None, :]
        if X.shape[1] != self.input_dim:
            raise ValidationError(
                f"covariate dimension {X.shape[1]} does not match the model's {self.input_dim}")
        if self.basis is not None:
            X = self.basis.expand(X)
        return (X - self.x_mean) / self.x_scale

    def velocities(self, X):
        Z = self.design(X)
        return Z[:, self.active] @ self.columns[self.active]

    def predict(self, X):
        return predict(self, X)

    def intercept(self):
        """Prediction at a raw covariate of zero."""
        return predict(self, np.zeros(self.input_dim))

    def slope_columns(self):
        """Columns in raw covariate units, carried to :meth:`intercept`.

        Exact along the fitted geodesic when a single column is active;
        otherwise the parallel transport is a first-order approximation.
        """
        z0 = self.design(np.zeros((1, self.input_dim)))[0]
        shift = self.manifold.proj(self.mu, z0[self.active] @ self.columns[self.active])
        raw = self.columns / self.x_scale[:, None]
        return self.manifold.transport(self.mu, shift, self.manifold.proj(self.mu, raw))


def predict(model, x):
    """``Exp(mu, sum_i z_i v_i)`` over the active columns.

    A 1-D ``x`` of the model's input length is one record and returns one
    point; 2-D input returns one point per row.
    """
    x = np.asarray(x, float)
    single = x.ndim == 0 or (x.ndim == 1 and (model.input_dim > 1 or x.size == 1))
    X = x.reshape(1, -1) if single else x
    vel = model.velocities(X)
    out = model.manifold.exp(model.mu, model.manifold.proj(model.mu, vel))
    return out[0] if single else out


# objective pieces -------------------------------------------------------------

@dataclass
class _State:
    Z: np.ndarray
    vel: np.ndarray
    yhat: np.ndarray
    resid: np.ndarray  # log(yhat_n, y_n), tangent at yhat_n
    sse: float


def _state(model, Z, Y):
    man = model.manifold
    vel = man.proj(model.mu, Z[:, model.active] @ model.columns[model.active])
    yhat = man.exp(model.mu, vel)
    try:
        resid = man.log(yhat, Y)
    except DomainError:
        bad = int(np.argmin(np.sum(yhat * Y, axis=-1)))
        raise DomainError(f"record {bad} sits at the cut locus of its prediction") from None
    return _State(Z, vel, yhat, resid, float(np.sum(resid * resid)))


def _column_precisions(model, use_prior, gamma):
    if use_prior:
        return np.where(model.active, model.alphas, 0.0)
    return np.full(model.q, gamma * model.tau)


def _energy_from_state(model, st, n, use_prior, gamma, quad):
    prec = _column_precisions(model, use_prior, gamma)
    sq = np.sum(model.columns * model.columns, axis=1)
    return (-n * log_normalizing_constant(model.manifold, model.tau, quad)
            - 0.5 * model.tau * st.sse - 0.5 * float(np.sum(prec * sq)))


def energy(model, data, use_prior=True, gamma=0.0, quad=DEFAULT_QUAD):
    """Log posterior up to a constant.

    With ``use_prior`` the column penalty is ``alpha_i/2 |v_i|^2``; without it
    the penalty is ``gamma*tau/2 |v_i|^2`` (``gamma=0`` gives the plain
    log-likelihood).  The two coincide when every ``alpha_i == gamma * tau``.
    """
    _check_pair(model, data)
    if gamma < 0.0:
        raise ValidationError("gamma must be non-negative")
    st = _state(model, model.design(data.X), data.Y)
    return _energy_from_state(model, st, len(data), use_prior, gamma, quad)


def _grad_mu_from_state(model, st):
    adj = model.manifold.dexp_base_adjoint(model.mu, st.vel, st.resid)
    return model.manifold.proj(model.mu, model.tau * adj.sum(axis=0))


def _grad_v_from_state(model, st, prec):
    adj = model.manifold.dexp_velocity_adjoint(model.mu, st.vel, st.resid)
    g = model.tau * (st.Z.T @ adj) - prec[:, None] * model.columns
    g[~model.active] = 0.0
    return model.manifold.proj(model.mu, g)


def grad_mu(model, data, quad=DEFAULT_QUAD):
    """Riemannian gradient of the log posterior in the base point.

    The columns are parallel-transported along with ``mu``, which makes the
    prior term invariant and leaves only the data term.
    """
    _check_pair(model, data)
    return _grad_mu_from_state(model, _state(model, model.design(data.X), data.Y))


def grad_v(model, data, quad=DEFAULT_QUAD):
    """Gradient in each column; inactive columns get zero."""
    _check_pair(model, data)
    st = _state(model, model.design(data.X), data.Y)
    return _grad_v_from_state(model, st, _column_precisions(model, True, 0.0))


def grad_tau(model, data, quad=DEFAULT_QUAD):
    """``-N C'(tau)/C(tau) - 1/2 sum_n d(y_n, yhat_n)^2``."""
    _check_pair(model, data)
    st = _state(model, model.design(data.X), data.Y)
    return (-len(data) * dlog_normalizing_constant(model.manifold, model.tau, quad)
            - 0.5 * st.sse)


def update_alphas(model, n, cfg):
    """``alpha_i = min(n / |v_i|^2, alpha_cap)``; inactive columns stay at the cap."""
    sq = np.sum(model.columns * model.columns, axis=1)
    alphas = np.minimum(n / np.maximum(sq, EPS_DIV), cfg.alpha_cap)
    return np.where(model.active, alphas, cfg.alpha_cap)


def prune(model, cfg):
    """Deactivate columns whose precision crossed ``prune_threshold`` or whose
    norm is negligible next to the largest column.  The largest active column
    always survives."""
    act = model.active
    if not act.any():
        return model.copy()
    norms = np.linalg.norm(model.columns, axis=1)
    vmax = norms[act].max()
    cand = act & ((model.alphas >= cfg.prune_threshold) | (norms <= 1e-6 * vmax))
    if cand.sum() == act.sum():
        keep = np.flatnonzero(act)[np.argmax(norms[act])]
        cand[keep] = False
    if not cand.any():
        return model.copy()
    out = model.copy()
    out.columns[cand] = 0.0
    out.active[cand] = False
    out.alphas[cand] = cfg.alpha_cap
    return out


def _check_pair(model, data):
    if model.manifold != data.manifold:
        raise ValidationError("model and data live on different manifolds")


# fitting ----------------------------------------------------------------------

@dataclass
class FitConfig:
    """Optimizer settings.

    Step sizes multiply preconditioned directions (a Newton step for the
    Euclidean model), so 1.0 is the natural full step.  Each block step is
    halved up to ``max_halvings`` times until the objective does not drop.
    A fit has converged once the objective moves by at most ``tol``
    (relative) and no parameter moves by more than ``param_tol``.
    """

    step_mu: float = 1.0
    step_v: float = 1.0
    step_tau: float = 1.0
    tol: float = 1e-12
    param_tol: float = 1e-10
    max_iter: int = 500
    alpha_cap: float = 1e8
    prune_threshold: float = 1e6
    covariate_standardization: bool = True
    seed: int = 0
    max_halvings: int = 30
    alpha_numerator: str = "dim"
    tau_min: float = 1e-8
    tau_max: float = 1e12

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValidationError("tol must be positive")
        if not self.param_tol > 0.0:
            raise ValidationError("param_tol must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        if not self.alpha_cap > self.prune_threshold:
            raise ValidationError("alpha_cap must exceed prune_threshold")
        if min(self.step_mu, self.step_v, self.step_tau) <= 0.0:
            raise ValidationError("step sizes must be positive")
        if self.alpha_numerator not in ("dim", "samples"):
            raise ValidationError("alpha_numerator must be 'dim' or 'samples'")
        if not 0.0 < self.tau_min < self.tau_max:
            raise ValidationError("invalid tau bounds")


@dataclass
class FitReport:
    energy_trace: list = field(default_factory=list)
    iterations: int = 0
    pruned_columns: list = field(default_factory=list)
    converged: bool = False
    wall_time: float = 0.0

    def to_dict(self, timing=True):
        d = {"energy_trace": [float(e) for e in self.energy_trace],
             "iterations": int(self.iterations),
             "pruned_columns": [int(i) for i in self.pruned_columns],
             "converged": bool(self.converged)}
        if timing:
            d["wall_time"] = float(self.wall_time)
        return d


def alpha_numerator(manifold, n_samples, cfg):
    """Numerator of the ARD update: the column dimension by default.

    With ``alpha_numerator='dim'`` the rule maximizes the log joint
    ``ln p(Y | V) + sum_i ln N(v_i | 0, 1/alpha_i)`` in each ``alpha_i``.
    """
    return float(manifold.dim if cfg.alpha_numerator == "dim" else n_samples)


class _Problem:
    """Objective bookkeeping for one fit."""

    def __init__(self, data, Z, mode, gamma, cfg, quad):
        self.man = data.manifold
        self.Y = data.Y
        self.Z = Z
        self.n = len(data)
        self.mode = mode
        self.gamma = gamma
        self.cfg = cfg
        self.quad = quad
        self.n_alpha = alpha_numerator(self.man, self.n, cfg)

    def precisions(self, model):
        if self.mode == "bgrm":
            return np.where(model.active, model.alphas, 0.0)
        if self.mode == "regularized":
            return np.full(model.q, self.gamma * model.tau)
        return np.zeros(model.q)

    def state(self, model):
        return _state(model, self.Z, self.Y)

    def objective(self, model, st):
        """Energy plus, in bgrm mode, the ``(n/2) ln alpha_i`` prior normalizers."""
        prec = self.precisions(model)
        sq = np.sum(model.columns * model.columns, axis=1)
        val = (-self.n * log_normalizing_constant(self.man, model.tau, self.quad)
               - 0.5 * model.tau * st.sse - 0.5 * float(np.sum(prec * sq)))
        if self.mode == "bgrm":
            val += 0.5 * self.n_alpha * float(np.sum(np.log(model.alphas)))
        return val


def _initial_model(data, Z, mode, gamma, cfg, quad, x_mean, x_scale, basis):
    man = data.manifold
    n, q = Z.shape
    try:
        mu0 = frechet_mean(man, data.Y)
    except ConvergenceError as err:
        mu0 = err.last
    L = man.log(mu0, data.Y)
    A = np.hstack([np.ones((n, 1)), Z])
    B, *_ = np.linalg.lstsq(A, L, rcond=None)
    b0 = man.proj(mu0, B[0])
    slopes = man.proj(mu0, B[1:])
    mu = man.exp(mu0, b0)
    cols = man.transport(mu0, b0, slopes)
    model = GeodesicModel(man, mu, man.proj(mu, cols), 1.0, np.zeros(q), np.ones(q, bool),
                          x_mean, x_scale, basis, mode, gamma)
    sse = _state(model, Z, data.Y).sse
    tau = n * man.dim / sse if sse > 0.0 else cfg.tau_max
    model.tau = float(np.clip(tau, cfg.tau_min, cfg.tau_max))
    if mode == "bgrm":
        model.alphas = update_alphas(model, alpha_numerator(man, n, cfg), cfg)
    return model


def _standardization(F, on):
    if not on:
        return np.zeros(F.shape[1]), np.ones(F.shape[1])
    mean = F.mean(axis=0)
    scale = F.std(axis=0)
    if np.any(scale <= 1e-12 * np.maximum(1.0, np.abs(mean))):
        raise ValidationError("a covariate is constant; standardization is undefined")
    return mean, scale


def fit(data, q=None, mode="bgrm", cfg=None, quad=DEFAULT_QUAD, gamma=0.0, basis=None,
        init=None):
    """Fit a geodesic model by block-wise preconditioned gradient ascent.

    Parameters
    ----------
    data : Dataset
    q : int, optional
        Number of leading covariate columns to use (all by default).  Ignored
        when ``basis`` or ``init`` fixes the design.
    mode : {'geodesic', 'regularized', 'bgrm'}
    cfg : FitConfig
    gamma : float
        Ridge weight for ``mode='regularized'``.
    basis : PolynomialBasis, optional
        Expands a scalar covariate into ``basis.degree`` columns.
    init : GeodesicModel, optional
        Warm start; its standardization and basis are reused.

    Returns
    -------
    model : GeodesicModel
    report : FitReport
        ``energy_trace`` records the objective after every iteration and
        never decreases.  In bgrm mode the objective also carries the
        ``(n/2) ln alpha_i`` normalizers of the column priors, which makes
        the precision update itself an ascent step.
    """
    t0 = time.perf_counter()
    cfg = cfg or FitConfig()
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}")
    if gamma < 0.0:
        raise ValidationError("gamma must be non-negative")
    n = len(data)
    if n < 2:
        raise ValidationError("fitting needs at least two records")

    if init is not None:
        if init.manifold != data.manifold:
            raise ValidationError("initial model is on a different manifold")
        model = init.copy(mode=mode, gamma=gamma)
        Z = model.design(data.X)
        if mode == "bgrm" and np.all(model.alphas[model.active] == 0.0):
            model.alphas = update_alphas(model, alpha_numerator(data.manifold, n, cfg), cfg)
    else:
        X = data.X
        if basis is not None:
            F = basis.expand(X)
        else:
            if q is not None:
                if not 1 <= q <= X.shape[1]:
                    raise ValidationError(f"q must be in [1, {X.shape[1]}]")
                X = X[:, :q]
            F = X
        if F.shape[1] < 1:
            raise ValidationError("q must be >= 1")
        x_mean, x_scale = _standardization(F, cfg.covariate_standardization)
        Z = (F - x_mean) / x_scale
        if basis is None and q is not None and q < data.X.shape[1]:
            data = Dataset(X, data.Y, data.manifold, data.covariate_names[:q])
        model = _initial_model(data, Z, mode, gamma, cfg, quad, x_mean, x_scale, basis)

    if mode == "regularized":
        model.alphas = np.full(model.q, gamma * model.tau)
    elif mode == "geodesic":
        model.alphas = np.zeros(model.q)

    prob = _Problem(data, Z, mode, gamma, cfg, quad)
    fitter = _Fitter(prob, model)
    fitter.run()
    rep = FitReport(fitter.trace, fitter.iterations, fitter.pruned, fitter.converged,
                    time.perf_counter() - t0)
    return fitter.model, rep


def _parameter_change(a, b):
    """Largest relative move between two iterates (precisions on a log scale)."""
    scale = max(1.0, float(np.max(np.abs(a.columns))))
    act = a.active & b.active
    moves = [float(np.max(np.abs(a.mu - b.mu))),
             float(np.max(np.abs(a.columns - b.columns))) / scale,
             abs(math.log(b.tau / a.tau))]
    if act.any() and np.all(a.alphas[act] > 0.0):
        moves.append(float(np.max(np.abs(np.log(b.alphas[act] / a.alphas[act])))))
    if not np.array_equal(a.active, b.active):
        moves.append(np.inf)
    return max(moves)


class _Fitter:
    def __init__(self, prob, model):
        self.prob = prob
        self.model = model
        self.st = prob.state(model)
        self.J = prob.objective(model, self.st)
        self.trace = [self.J]
        cfg = prob.cfg
        self.eta = {"mu": cfg.step_mu, "v": cfg.step_v, "tau": cfg.step_tau}
        self.iterations = 0
        self.converged = False
        self.pruned = []
        self._initially_inactive = set(np.flatnonzero(~model.active))

    # candidate evaluation
    def _try(self, trial):
        try:
            st = self.prob.state(trial)
        except DomainError:
            return None
        J = self.prob.objective(trial, st)
        if not math.isfinite(J) or J < self.J:
            return None
        return st, J

    def _line_search(self, key, make_trial):
        eta = self.eta[key]
        cfg = self.prob.cfg
        for _ in range(cfg.max_halvings + 1):
            try:
                trial = make_trial(eta)
            except DomainError:
                trial = None
            res = None if trial is None else self._try(trial)
            if res is not None:
                self.model, (self.st, self.J) = trial, res
                self.eta[key] = min(1.0, 2.0 * eta)
                return True
            eta *= 0.5
        self.eta[key] = max(eta, 1e-6)
        return False

    def _sync_precisions(self, model):
        if self.prob.mode == "regularized":
            model.alphas = np.full(model.q, self.prob.gamma * model.tau)
        return model

    def step_mu(self):
        m, man = self.model, self.prob.man
        direction = _grad_mu_from_state(m, self.st) / (m.tau * self.prob.n)

        def make(eta):
            step = eta * direction
            if np.linalg.norm(step) >= np.pi:
                return None
            mu = man.exp(m.mu, step)
            cols = man.proj(mu, man.transport(m.mu, step, m.columns))
            cols[~m.active] = 0.0
            return m.copy(mu=mu, columns=cols)

        return self._line_search("mu", make)

    def step_v(self):
        m, man = self.model, self.prob.man
        act = m.active
        prec = self.prob.precisions(m)
        g = _grad_v_from_state(m, self.st, prec)
        Za = self.st.Z[:, act]
        H = m.tau * (Za.T @ Za) + np.diag(prec[act])
        try:
            d_act = np.linalg.solve(H, g[act])
        except np.linalg.LinAlgError:
            d_act = np.linalg.lstsq(H, g[act], rcond=None)[0]
        direction = np.zeros_like(g)
        direction[act] = d_act

        def make(eta):
            cols = man.proj(m.mu, m.columns + eta * direction)
            cols[~act] = 0.0
            return m.copy(columns=cols)

        return self._line_search("v", make)

    def step_tau(self):
        m, prob = self.model, self.prob
        extra = 0.0
        if prob.mode == "regularized":
            extra = prob.gamma * float(np.sum(m.columns * m.columns))
        s_eff = self.st.sse + extra
        dlogc = dlog_normalizing_constant(prob.man, m.tau, prob.quad)
        g_log = m.tau * (-prob.n * dlogc - 0.5 * s_eff)
        curv = 0.5 * max(prob.n * prob.man.dim, m.tau * s_eff)
        direction = g_log / curv
        lo, hi = math.log(prob.cfg.tau_min), math.log(prob.cfg.tau_max)

        def make(eta):
            s = min(max(math.log(m.tau) + eta * direction, lo), hi)
            return self._sync_precisions(m.copy(tau=math.exp(s)))

        return self._line_search("tau", make)

    def step_alphas(self):
        m, prob = self.model, self.prob
        trial = m.copy(alphas=update_alphas(m, prob.n_alpha, prob.cfg))
        J = prob.objective(trial, self.st)
        if J >= self.J:
            self.model, self.J = trial, J
            return True
        return False

    def step_prune(self):
        m, prob = self.model, self.prob
        trial = prune(m, prob.cfg)
        newly = np.flatnonzero(m.active & ~trial.active)
        if newly.size == 0:
            return False
        res = self._try(trial)
        if res is None:
            return False
        self.model, (self.st, self.J) = trial, res
        self.pruned.extend(int(i) for i in newly)
        return True

    def run(self):
        cfg = self.prob.cfg
        for it in range(1, cfg.max_iter + 1):
            J_prev, prev = self.J, self.model
            self.step_mu()
            self.step_v()
            self.step_tau()
            if self.prob.mode == "bgrm":
                self.step_alphas()
                self.step_prune()
            self.trace.append(self.J)
            self.iterations = it
            if (abs(self.J - J_prev) <= cfg.tol * max(1.0, abs(self.J))
                    and _parameter_change(prev, self.model) <= cfg.param_tol):
                self.converged = True
                break
        self.pruned.sort()


def log_likelihood(model, data, quad=DEFAULT_QUAD):
    """Data log-likelihood of a fitted model (no prior term)."""
    from .stats import log_likelihood as _ll
    return _ll(model, data, quad)
