"""``geomreg simulate|fit|predict|evaluate|plot``.

Exit status: 0 on success, 1 for invalid input or I/O failures, 2 when a
computation fails numerically.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io, plotting
from .baselines import fit_ols
from .errors import GeomRegError, NumericalError, ValidationError
from .evaluation import compare_models, pvalue_from_replicates, permutation_test
from .manifolds import Euclidean, Sphere, make_manifold
from .regression import MODES, Dataset, FitConfig, GeodesicModel, PolynomialBasis, fit
from .shapes import ShapeSet, dataset_to_shapes, generate_pentagons, generate_sphere_dataset
from .stats import RiemannianNormal, QuadratureConfig, sample

SPHERE_MU = np.array([0.7704, 0.4155, 0.4836])
SPHERE_COLUMNS = np.array([[0.0755, -0.2771, -0.2784],
                           [-0.0002, 0.0007, 0.0100]])
SPHERE_TAU = 100.0
SPHERE_N = 293
GENERATORS = ("sphere-table1", "pentagon", "custom")


class _Parser(argparse.ArgumentParser):
    # argparse would exit with status 2, which is reserved for numerical failures
    def error(self, message):
        raise ValidationError(message)


# helpers ----------------------------------------------------------------------

def _check_input(path):
    if path is None:
        return
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")


def _check_output(path):
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK):
        raise PermissionError(f"output directory is not writable: {parent}")


def _sidecar(path, suffix):
    p = Path(path)
    return str(p.with_name(p.stem + suffix))


def _quad(args):
    return QuadratureConfig(node_count=args.quad_nodes)


def _cfg(args):
    return FitConfig(tol=args.tol, max_iter=args.max_iter, seed=args.seed,
                     covariate_standardization=args.standardize == "on",
                     alpha_numerator=args.alpha_numerator)


def _load_data(path, manifold=None):
    """Read a dataset; landmark files are aligned onto the preshape sphere."""
    data = io.as_manifold_dataset(io.read_dataset(path))
    if manifold is None or manifold == data.manifold.kind:
        return data
    D = data.Y.shape[1]
    if manifold == "euclidean":
        man = Euclidean(D)
    elif manifold == "sphere":
        man = Sphere(D)
    else:
        if D % 2:
            raise ValidationError("preshape data needs an even ambient dimension")
        man = make_manifold("preshape", k=D // 2)
    return Dataset(data.X, data.Y, man, data.covariate_names)


def _design_args(data, q):
    """Map ``--q`` onto leading covariates or, for one covariate, a Legendre basis."""
    p = data.X.shape[1]
    if q is None:
        return None, None
    if q < 1:
        raise ValidationError("--q must be >= 1")
    if q <= p:
        return q, None
    if p == 1:
        return None, PolynomialBasis.for_covariate(data.X[:, 0], q)
    raise ValidationError(f"--q {q} exceeds the {p} covariates in the dataset")


def _parse_covariates(text, input_dim):
    """``a:b[:step]`` inclusive range (scalar models) or rows ``x1,x2;x1,x2``."""
    text = text.strip()
    if ":" in text:
        parts = [float(s) for s in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValidationError("range must be 'start:stop' or 'start:stop:step'")
        start, stop = parts[:2]
        step = parts[2] if len(parts) == 3 else 1.0
        if step <= 0 or stop < start:
            raise ValidationError("range needs start <= stop and a positive step")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        X = (start + step * np.arange(count))[:, None]
    else:
        try:
            X = np.array([[float(v) for v in row.split(",")] for row in text.split(";")])
        except ValueError as err:
            raise ValidationError(f"bad covariate list: {err}") from None
    if X.shape[1] != input_dim:
        raise ValidationError(
            f"covariates have dimension {X.shape[1]} but the model expects {input_dim}")
    return X


def _truth_model(doc):
    if doc.get("format") != "geomreg-truth":
        raise ValidationError("not a geomreg truth document")
    m = doc.get("model")
    return None if m is None else io.model_from_dict(m)


# subcommands --------------------------------------------------------------------

def _truth_doc(generator, args, model=None, extra=None):
    d = {"format": "geomreg-truth", "version": 1, "generator": generator, "seed": args.seed,
         "model": None if model is None else io.model_to_dict(model)}
    if extra:
        d["params"] = extra
    return d


def cmd_simulate(args):
    _check_output(args.output)
    truth_path = args.truth or _sidecar(args.output, ".truth.json")
    _check_output(truth_path)
    if args.generator == "sphere-table1":
        S = Sphere(3)
        mu = S.normalize(SPHERE_MU)
        cols = S.proj(mu, SPHERE_COLUMNS)
        n = args.n or SPHERE_N
        data = generate_sphere_dataset(mu, cols, SPHERE_TAU, n, args.seed, S)
        truth = GeodesicModel(S, mu, cols, SPHERE_TAU, np.zeros(2), np.ones(2, bool),
                              np.zeros(2), np.ones(2), mode="geodesic")
        io.write_dataset(args.output, data)
        io.write_json(truth_path, _truth_doc(args.generator, args, truth, {"n": n}))
    elif args.generator == "pentagon":
        n = args.n or 50
        shapes = generate_pentagons(n, args.noise, args.seed)
        io.write_shapes(args.output, shapes)
        io.write_json(truth_path, _truth_doc(args.generator, args, None,
                                             {"n": n, "noise": args.noise,
                                              "landmarks": shapes.k}))
    else:
        data, truth = simulate_custom(args)
        io.write_dataset(args.output, data)
        io.write_json(truth_path, _truth_doc(args.generator, args, truth,
                                             {"n": len(data), "scale": args.scale}))
    return 0


def simulate_custom(args):
    kind = args.manifold or "sphere"
    if kind == "preshape":
        if args.k is None or args.k < 3:
            raise ValidationError("custom preshape data needs --k >= 3 landmarks")
        man = make_manifold("preshape", k=args.k)
    else:
        if args.dim is None or args.dim < (1 if kind == "euclidean" else 2):
            raise ValidationError(f"custom {kind} data needs a valid --dim")
        man = make_manifold(kind, dim=args.dim)
    q = args.q or 1
    n = args.n or 100
    tau = args.tau
    rng = np.random.default_rng(args.seed)
    if kind == "euclidean":
        mu = rng.standard_normal(man.ambient_dim)
    else:
        mu = man.random_point(rng)
    cols = man.proj(mu, rng.standard_normal((q, man.ambient_dim)))
    cols *= args.scale / np.maximum(np.linalg.norm(cols, axis=1, keepdims=True), 1e-300)
    truth = GeodesicModel(man, mu, cols, tau, np.zeros(q), np.ones(q, bool), np.zeros(q),
                          np.ones(q), mode="geodesic")
    X = rng.random((n, q))
    centers = truth.predict(X)
    Y = np.array([sample(RiemannianNormal(man, c, tau), rng) for c in centers])
    return Dataset(X, Y, man), truth


def cmd_fit(args):
    _check_input(args.input)
    _check_input(args.init)
    _check_output(args.output)
    report_path = args.report or _sidecar(args.output, ".report.json")
    _check_output(report_path)
    if args.mode not in MODES:
        raise ValidationError(f"unknown mode {args.mode!r}")
    data = _load_data(args.input, args.manifold)
    init = io.read_model(args.init) if args.init else None
    q, basis = _design_args(data, args.q)
    model, rep = fit(data, q=q, mode=args.mode, cfg=_cfg(args), quad=_quad(args),
                     gamma=args.gamma, basis=basis, init=init)
    names = data.covariate_names if model.basis is not None or q is None \
        else data.covariate_names[:q]
    io.write_model(args.output, model, names)
    doc = rep.to_dict()
    doc.update({"format": "geomreg-fit-report", "version": 1, "mode": args.mode,
                "q": model.q, "active_columns": [int(i) for i in np.flatnonzero(model.active)],
                "tau": model.tau})
    io.write_json(report_path, doc)
    return 0


def cmd_predict(args):
    _check_input(args.model)
    _check_input(args.input)
    _check_output(args.output)
    model = io.read_model(args.model)
    if args.input:
        X = io.as_manifold_dataset(io.read_dataset(args.input)).X
        if X.shape[1] != model.input_dim:
            raise ValidationError(f"dataset has {X.shape[1]} covariates, "
                                  f"model expects {model.input_dim}")
    elif args.covariates:
        X = _parse_covariates(args.covariates, model.input_dim)
    else:
        raise ValidationError("predict needs --covariates or --input")
    Y = model.predict(X)
    names = io.read_json(args.model).get("covariate_names") \
        or [f"x{i + 1}" for i in range(model.input_dim)]
    pred = Dataset(X, Y, model.manifold, names)
    io.write_dataset(args.output, pred)
    if model.manifold.kind == "preshape":
        lm_path = args.landmarks_output or _sidecar(args.output, ".landmarks.csv")
        _check_output(lm_path)
        io.write_shapes(lm_path, dataset_to_shapes(pred))
    return 0


def _linear_model(data):
    flat = Dataset(data.X, data.Y, Euclidean(data.Y.shape[1]), data.covariate_names)
    return fit_ols(flat)


def cmd_evaluate(args):
    _check_input(args.input)
    _check_input(args.model)
    _check_output(args.output)
    _check_output(args.report_json)
    data = _load_data(args.input, args.manifold)
    cfg, quad = _cfg(args), _quad(args)
    if args.compare:
        q, basis = _design_args(data, args.q)
        geo, _ = fit(data, q=q if basis is None else 1, mode="geodesic", cfg=cfg, quad=quad)
        bg, _ = fit(data, q=q, mode="bgrm", cfg=cfg, quad=quad, basis=basis)
        lin_data = data if q is None or basis is not None else Dataset(
            data.X[:, :q], data.Y, data.manifold, data.covariate_names[:q])
        models = [("linear", _linear_model(lin_data)), ("geodesic", geo), ("bgrm", bg)]
        last = bg
    elif args.model:
        last = io.read_model(args.model)
        models = [(last.mode, last)]
    else:
        raise ValidationError("evaluate needs --model or --compare")
    n_cov = data.X.shape[1]
    if last.basis is None and last.q != n_cov:
        data_eval = Dataset(data.X[:, :last.q], data.Y, data.manifold,
                            data.covariate_names[:last.q])
    else:
        data_eval = data
    p_value = None
    if args.permutations:
        r2_obs, r2_perm = permutation_test(
            data_eval, q=None if last.basis else last.q, cfg=cfg, n_perm=args.permutations,
            seed=args.seed, mode=last.mode, gamma=last.gamma, basis=last.basis, quad=quad)
        p_value = pvalue_from_replicates(r2_obs, r2_perm)
    report = compare_models(data if args.compare else data_eval, models, p_value)
    table = io.format_eval_table(report, with_p=bool(args.permutations))
    with open(args.output, "w", newline="\n") as f:
        f.write(table)
    if args.report_json:
        io.write_json(args.report_json, io.eval_report_to_dict(report))
    sys.stdout.write(table)
    return 0


def cmd_plot(args):
    for p in (args.input, args.model, args.truth, args.report):
        _check_input(p)
    _check_output(args.output)
    kind = args.kind
    if kind == "sphere-geodesic":
        if not args.input:
            raise ValidationError("sphere-geodesic needs --input")
        data = io.as_manifold_dataset(io.read_dataset(args.input))
        est = io.read_model(args.model) if args.model else None
        truth = _truth_model(io.read_json(args.truth)) if args.truth else None
        svg = plotting.sphere_geodesic(data, est, truth)
    elif kind == "shape-sequence":
        if not args.input:
            raise ValidationError("shape-sequence needs --input")
        obj = io.read_dataset(args.input)
        if not isinstance(obj, ShapeSet):
            if obj.manifold.kind != "preshape":
                raise ValidationError("shape-sequence needs landmark or preshape data")
            obj = dataset_to_shapes(obj)
        svg = plotting.shape_sequence(obj)
    elif kind == "dimension-bars":
        if not args.model:
            raise ValidationError("dimension-bars needs --model")
        m = io.read_model(args.model)
        svg = plotting.dimension_bars(m.manifold.ambient_dim, int(m.active.sum()), m.q)
    elif kind == "energy-trace":
        if not args.report:
            raise ValidationError("energy-trace needs --report")
        doc = io.read_json(args.report)
        if "energy_trace" not in doc:
            raise ValidationError("report has no energy trace")
        svg = plotting.energy_trace(doc["energy_trace"])
    else:
        raise ValidationError(f"unknown plot kind {kind!r}")
    svg.save(args.output)
    return 0


# parser ------------------------------------------------------------------------

def _fit_flags(p):
    p.add_argument("--mode", choices=MODES, default="bgrm")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--q", type=int, default=None,
                   help="number of leading covariates, or the Legendre basis degree "
                        "when the data has one covariate and q exceeds 1")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--standardize", choices=("on", "off"), default="on")
    p.add_argument("--alpha-numerator", choices=("dim", "samples"), default="dim")
    p.add_argument("--quad-nodes", type=int, default=128)
    p.add_argument("--manifold", choices=("euclidean", "sphere", "preshape"), default=None)


def build_parser():
    parser = _Parser(prog="geomreg", description="Bayesian geodesic regression on spheres "
                                                 "and planar shape spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic dataset and its ground truth")
    p.add_argument("--generator", choices=GENERATORS, default="sphere-table1")
    p.add_argument("--output", required=True)
    p.add_argument("--truth", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--manifold", choices=("euclidean", "sphere", "preshape"), default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--tau", type=float, default=100.0)
    p.add_argument("--scale", type=float, default=0.3)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a model to a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--init", default=None)
    p.add_argument("--seed", type=int, default=0)
    _fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a fitted model at new covariates")
    p.add_argument("--model", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--covariates", default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--landmarks-output", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="R^2 table, optional permutation p-value")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--compare", action="store_true")
    p.add_argument("--permutations", type=int, default=0)
    p.add_argument("--report-json", default=None)
    p.add_argument("--seed", type=int, default=0)
    _fit_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plot", help="write an SVG figure")
    p.add_argument("--kind", choices=plotting.PLOT_KINDS, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--input", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--truth", default=None)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except NumericalError as err:
        print(f"geomreg: numerical error: {err}", file=sys.stderr)
        return 2
    except (GeomRegError, ValueError, OSError) as err:
        print(f"geomreg: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
