"""Goodness of fit: geodesic R^2, permutation p-values and comparison tables."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .manifolds import Euclidean
from .regression import fit
from .stats import DEFAULT_QUAD, frechet_mean


@dataclass
class EvalReport:
    """One row per model; ``r_squared`` and ``residual_summary`` describe the last row."""

    r_squared: float
    p_value: float = None
    per_model_rows: list = field(default_factory=list)
    residual_summary: dict = field(default_factory=dict)
    r_squared_raw: float = None

    def __post_init__(self):
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValidationError("r_squared must lie in [0, 1]")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValidationError("p_value must lie in [0, 1]")


def _residuals(model, data):
    man = model.manifold
    yhat = model.predict(data.X)
    if isinstance(man, Euclidean) and not isinstance(data.manifold, Euclidean):
        man = Euclidean(data.Y.shape[1])
    return man, man.dist(yhat, data.Y)


def r_squared(model, data, clamp=True):
    """``1 - sum d(y_i, yhat_i)^2 / sum d(y_i, ybar)^2`` with geodesic ``d``.

    ``ybar`` is the Frechet mean.  Euclidean models (including baselines
    applied to manifold data) use ambient distances and the arithmetic mean.
    """
    if len(data) == 0:
        raise ValidationError("R^2 of an empty dataset")
    man, res = _residuals(model, data)
    ybar = frechet_mean(man, data.Y)
    tot = float(np.sum(man.dist(ybar, data.Y) ** 2))
    if tot <= 0.0:
        raise ValidationError("zero total variation: all responses are identical")
    val = 1.0 - float(np.sum(res * res)) / tot
    return min(max(val, 0.0), 1.0) if clamp else val


def pvalue_from_replicates(r2_obs, r2_perm):
    """Add-one permutation p-value: ``(1 + #{perm >= obs}) / (1 + n_perm)``."""
    r2_perm = np.asarray(r2_perm, float)
    return (1.0 + np.count_nonzero(r2_perm >= r2_obs)) / (1.0 + r2_perm.size)


def permutation_test(data, q=None, cfg=None, n_perm=200, seed=0, mode="geodesic",
                     gamma=0.0, basis=None, quad=DEFAULT_QUAD):
    """Observed R^2 and its permutation replicates.

    Every replicate refits the model on the data with covariate rows
    shuffled by a seeded generator; replicates share no state.
    """
    if n_perm < 100:
        raise ValidationError("n_perm must be at least 100")
    kw = dict(q=q, mode=mode, cfg=cfg, quad=quad, gamma=gamma, basis=basis)
    model, _ = fit(data, **kw)
    r2_obs = r_squared(model, data, clamp=False)
    rng = np.random.default_rng(seed)
    perms = [rng.permutation(len(data)) for _ in range(n_perm)]
    r2_perm = np.empty(n_perm)
    for i, perm in enumerate(perms):
        shuffled = data.permuted(perm)
        m, _ = fit(shuffled, **kw)
        r2_perm[i] = r_squared(m, shuffled, clamp=False)
    return r2_obs, r2_perm


def permutation_pvalue(data, q=None, cfg=None, n_perm=200, seed=0, **kw):
    r2_obs, r2_perm = permutation_test(data, q, cfg, n_perm, seed, **kw)
    return pvalue_from_replicates(r2_obs, r2_perm)


def compare_models(data, model_list, p_value=None):
    """R^2 row for each ``(name, model)`` pair, in the given order."""
    if not model_list:
        raise ValidationError("no models to compare")
    rows = []
    for name, model in model_list:
        man, _ = _residuals(model, data)
        metric = "euclidean" if isinstance(man, Euclidean) and not isinstance(
            data.manifold, Euclidean) else "geodesic"
        rows.append((name, r_squared(model, data), metric))
    _, res = _residuals(model_list[-1][1], data)
    raw = r_squared(model_list[-1][1], data, clamp=False)
    return EvalReport(rows[-1][1], p_value, rows,
                      {"mean": float(res.mean()), "max": float(res.max())}, raw)
