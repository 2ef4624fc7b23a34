"""Text file formats: delimited datasets, JSON model and report documents.

Dataset files carry a ``#``-prefixed header followed by one comma-separated
record per line (covariates first, then the flattened response)::

    # geomreg dataset v1
    # manifold: sphere
    # ambient_dim: 3
    # q: 2
    # covariates: x1,x2
    x1,x2,y1,y2,y3
    0.25,0.5,0.77,0.41,0.48

``manifold: landmarks`` stores raw planar landmark configurations (``k``
required); they become a preshape dataset via :func:`as_manifold_dataset`.
Floats are written with 17 significant digits so every file reads back to
the identical binary values.
"""

import json
import math

import numpy as np

from .errors import ParseError, ValidationError
from .manifolds import make_manifold
from .regression import Dataset, FitReport, GeodesicModel, PolynomialBasis
from .shapes import LandmarkShape, ShapeSet, shapes_to_dataset

DATASET_MAGIC = "geomreg dataset v1"
MODEL_FORMAT = "geomreg-model"
MODEL_VERSION = 1
MANIFOLD_TAGS = ("euclidean", "sphere", "preshape", "landmarks")


def fmt(x):
    return format(float(x), ".17g")


# datasets ---------------------------------------------------------------------

def manifold_header(manifold):
    d = {"kind": manifold.kind, "ambient_dim": manifold.ambient_dim}
    if manifold.kind == "preshape":
        d["k"] = manifold.k
    return d


def format_dataset(X, Y, tag, covariate_names, k=None):
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    names = list(covariate_names)
    lines = [f"# {DATASET_MAGIC}", f"# manifold: {tag}", f"# ambient_dim: {Y.shape[1]}"]
    if k is not None:
        lines.append(f"# k: {k}")
    lines += [f"# q: {X.shape[1]}", f"# covariates: {','.join(names)}",
              ",".join(names + [f"y{i + 1}" for i in range(Y.shape[1])])]
    for x, y in zip(X, Y):
        lines.append(",".join(fmt(v) for v in np.concatenate([x, y])))
    return "\n".join(lines) + "\n"


def write_dataset(path, data):
    man = data.manifold
    k = man.k if man.kind == "preshape" else None
    with open(path, "w", newline="\n") as f:
        f.write(format_dataset(data.X, data.Y, man.kind, data.covariate_names, k))


def write_shapes(path, shapes):
    """Raw landmark configurations under the ``landmarks`` tag."""
    X = shapes.covariates
    Y = np.array([s.points.ravel() for s in shapes.shapes])
    with open(path, "w", newline="\n") as f:
        f.write(format_dataset(X, Y, "landmarks", shapes.covariate_names, shapes.k))


def _int_field(header, key, lineno):
    if key not in header:
        raise ParseError("missing header field", line=lineno, field=key)
    try:
        val = int(header[key][0])
    except ValueError:
        raise ParseError(f"not an integer: {header[key][0]!r}", line=header[key][1],
                         field=key) from None
    if val < 1:
        raise ParseError("must be positive", line=header[key][1], field=key)
    return val


def read_table(path):
    """Parse a dataset file into ``(tag, X, Y, names, k)`` without manifold checks."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or lines[0].strip() != f"# {DATASET_MAGIC}":
        raise ParseError(f"not a geomreg dataset (expected '# {DATASET_MAGIC}')", line=1,
                         field="format")
    header = {}
    i = 1
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        if ":" not in body:
            raise ParseError("header line must be 'key: value'", line=i + 1)
        key, val = body.split(":", 1)
        header[key.strip()] = (val.strip(), i + 1)
        i += 1
    end = i + 1
    if "manifold" not in header:
        raise ParseError("missing header field", line=end, field="manifold")
    tag, tag_line = header["manifold"]
    if tag not in MANIFOLD_TAGS:
        raise ParseError(f"unknown manifold {tag!r}", line=tag_line, field="manifold")
    dim = _int_field(header, "ambient_dim", end)
    q = _int_field(header, "q", end)
    k = _int_field(header, "k", end) if tag in ("preshape", "landmarks") else None
    if k is not None and dim != 2 * k:
        raise ParseError(f"ambient_dim {dim} does not equal 2k = {2 * k}",
                         line=header["ambient_dim"][1], field="ambient_dim")
    if "covariates" not in header:
        raise ParseError("missing header field", line=end, field="covariates")
    names = [s.strip() for s in header["covariates"][0].split(",") if s.strip()]
    if len(names) != q:
        raise ParseError(f"{len(names)} covariate names for q = {q}",
                         line=header["covariates"][1], field="covariates")
    if i >= len(lines):
        raise ParseError("missing column header row", line=i + 1)
    i += 1  # column header row
    rows = []
    for j in range(i, len(lines)):
        text = lines[j].strip()
        if not text:
            continue
        parts = text.split(",")
        if len(parts) != q + dim:
            raise ParseError(f"expected {q + dim} values, found {len(parts)}", line=j + 1)
        try:
            vals = [float(p) for p in parts]
        except ValueError as err:
            raise ParseError(f"bad number ({err})", line=j + 1) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", line=j + 1)
        rows.append(vals)
    arr = np.array(rows, float).reshape(-1, q + dim)
    return tag, arr[:, :q], arr[:, q:], tuple(names), k


def read_dataset(path):
    """Read a dataset file.  Landmark files come back as a :class:`ShapeSet`."""
    tag, X, Y, names, k = read_table(path)
    if tag == "landmarks":
        shapes = [LandmarkShape(y.reshape(k, 2), x) for x, y in zip(X, Y)]
        return ShapeSet(shapes, names)
    man = make_manifold(tag, dim=Y.shape[1], k=k)
    try:
        return Dataset(X, Y, man, names)
    except ValidationError as err:
        raise ParseError(f"records do not lie on the declared manifold: {err}",
                         field="manifold") from None


def as_manifold_dataset(obj):
    return shapes_to_dataset(obj) if isinstance(obj, ShapeSet) else obj


# models -------------------------------------------------------------------------

def model_to_dict(model, covariate_names=None):
    d = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "manifold": manifold_header(model.manifold),
        "mode": model.mode,
        "gamma": float(model.gamma),
        "mu": [float(v) for v in model.mu],
        "columns": [[float(v) for v in c] for c in model.columns],
        "tau": float(model.tau),
        "alphas": [float(a) for a in model.alphas],
        "active": [bool(a) for a in model.active],
        "standardization": {"mean": [float(v) for v in model.x_mean],
                            "scale": [float(v) for v in model.x_scale]},
        "basis": None if model.basis is None else model.basis.to_dict(),
    }
    if covariate_names is not None:
        d["covariate_names"] = list(covariate_names)
    return d


def _need(d, key):
    if key not in d:
        raise ParseError("missing model field", field=key)
    return d[key]


def model_from_dict(d):
    if d.get("format") != MODEL_FORMAT:
        raise ParseError("not a geomreg model document", field="format")
    if d.get("version") != MODEL_VERSION:
        raise ParseError(f"unsupported model version {d.get('version')!r}", field="version")
    mh = _need(d, "manifold")
    try:
        man = make_manifold(mh["kind"], dim=mh.get("ambient_dim"), k=mh.get("k"))
        std = _need(d, "standardization")
        basis = d.get("basis")
        return GeodesicModel(
            man, _need(d, "mu"), _need(d, "columns"), _need(d, "tau"), _need(d, "alphas"),
            _need(d, "active"), std["mean"], std["scale"],
            None if basis is None else PolynomialBasis.from_dict(basis),
            d.get("mode", "bgrm"), d.get("gamma", 0.0))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"invalid model document: {err}") from None


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", newline="\n") as f:
        f.write(dump_json(obj))


def read_json(path):
    with open(path) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON: {err.msg}", line=err.lineno) from None


def write_model(path, model, covariate_names=None):
    write_json(path, model_to_dict(model, covariate_names))


def read_model(path):
    return model_from_dict(read_json(path))


def report_from_dict(d):
    return FitReport(d["energy_trace"], d["iterations"], d["pruned_columns"], d["converged"],
                     d.get("wall_time", 0.0))


# evaluation tables ----------------------------------------------------------------

def format_eval_table(report, with_p=False):
    head = ["model", "r_squared", "metric"] + (["p_value"] if with_p else [])
    lines = ["\t".join(head)]
    last = len(report.per_model_rows) - 1
    for i, (name, r2, metric) in enumerate(report.per_model_rows):
        row = [name, fmt(r2), metric]
        if with_p:
            row.append(fmt(report.p_value) if i == last and report.p_value is not None else "")
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def read_eval_table(path):
    with open(path) as f:
        lines = f.read().splitlines()
    head = lines[0].split("\t")
    rows = []
    for line in lines[1:]:
        parts = line.split("\t")
        row = dict(zip(head, parts))
        row["r_squared"] = float(row["r_squared"])
        if row.get("p_value"):
            row["p_value"] = float(row["p_value"])
        rows.append(row)
    return head, rows


def eval_report_to_dict(report):
    return {"r_squared": report.r_squared, "r_squared_raw": report.r_squared_raw,
            "p_value": report.p_value,
            "rows": [{"model": n, "r_squared": r, "metric": m}
                     for n, r, m in report.per_model_rows],
            "residual_summary": report.residual_summary}
