import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomreg import io
from geomreg.cli import main
from geomreg.errors import ParseError
from geomreg.manifolds import Euclidean, Sphere
from geomreg.regression import Dataset, FitConfig, PolynomialBasis, fit
from geomreg.shapes import generate_pentagons, shapes_to_dataset

from helpers import sphere_problem


def run(*argv):
    return main([str(a) for a in argv])


# file formats ------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                min_size=2, max_size=12))
def test_dataset_roundtrip_exact(tmp_path_factory, vals):
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    X = np.array(vals)[:, None]
    Y = np.array(vals[::-1])[:, None]
    io.write_dataset(path, Dataset(X, Y, Euclidean(1), ("age",)))
    back = io.read_dataset(path)
    assert np.array_equal(back.X, X) and np.array_equal(back.Y, Y)
    assert back.covariate_names == ("age",)


def test_sphere_and_landmark_roundtrip(tmp_path):
    _, data = sphere_problem(0, q=2, n=10)
    io.write_dataset(tmp_path / "s.csv", data)
    back = io.read_dataset(tmp_path / "s.csv")
    assert back.manifold == Sphere(3) and np.array_equal(back.Y, data.Y)
    shapes = generate_pentagons(5)
    io.write_shapes(tmp_path / "l.csv", shapes)
    lm = io.read_dataset(tmp_path / "l.csv")
    assert all(np.array_equal(a.points, b.points) for a, b in zip(lm.shapes, shapes.shapes))
    pre = shapes_to_dataset(shapes)
    io.write_dataset(tmp_path / "p.csv", pre)
    assert np.array_equal(io.read_dataset(tmp_path / "p.csv").Y, pre.Y)


def test_model_roundtrip(tmp_path):
    data = shapes_to_dataset(generate_pentagons(20))
    model, _ = fit(data, basis=PolynomialBasis.for_covariate(data.X[:, 0], 4))
    io.write_model(tmp_path / "m.json", model, ["x"])
    back = io.read_model(tmp_path / "m.json")
    for f in ("mu", "columns", "alphas", "active", "x_mean", "x_scale"):
        assert np.array_equal(getattr(back, f), getattr(model, f))
    assert back.tau == model.tau and back.basis == model.basis
    assert back.manifold == model.manifold and back.mode == model.mode


def _write(path, text):
    path.write_text(text)
    return path


HEADER = ("# geomreg dataset v1\n# manifold: sphere\n# ambient_dim: 3\n# q: 1\n"
          "# covariates: x\nx,y1,y2,y3\n")


@pytest.mark.parametrize("text,field,line", [
    (HEADER.replace("sphere", "torus"), "manifold", 2),
    (HEADER.replace("ambient_dim: 3", "ambient_dim: three"), "ambient_dim", 3),
    (HEADER.replace("# q: 1\n", ""), "q", None),
    (HEADER.replace("x\nx", "a,b\nx"), "covariates", 5),
    ("garbage\n", "format", 1),
])
def test_parse_errors_name_field(tmp_path, text, field, line):
    with pytest.raises(ParseError) as err:
        io.read_dataset(_write(tmp_path / "bad.csv", text))
    assert err.value.field == field
    if line is not None:
        assert err.value.line == line
    assert field in str(err.value)


def test_parse_errors_name_line(tmp_path):
    with pytest.raises(ParseError, match="line 8"):
        io.read_dataset(_write(tmp_path / "b.csv", HEADER + "0,1,0,0\n0,1,0\n"))
    with pytest.raises(ParseError, match="line 7"):
        io.read_dataset(_write(tmp_path / "c.csv", HEADER + "0,1,zero,0\n"))
    with pytest.raises(ParseError, match="manifold"):
        io.read_dataset(_write(tmp_path / "d.csv", HEADER + "0,1,1,0\n"))


def test_eval_table_roundtrip(tmp_path):
    from geomreg.evaluation import EvalReport
    rep = EvalReport(0.5, 0.01, [("linear", 0.25, "euclidean"), ("bgrm", 0.5, "geodesic")])
    (tmp_path / "t.tsv").write_text(io.format_eval_table(rep, with_p=True))
    head, rows = io.read_eval_table(tmp_path / "t.tsv")
    assert head == ["model", "r_squared", "metric", "p_value"]
    assert rows[1]["p_value"] == 0.01 and rows[0]["r_squared"] == 0.25


# command line --------------------------------------------------------------------------

def test_simulate_deterministic(tmp_path):
    for tag in "ab":
        assert run("simulate", "--generator", "sphere-table1", "--seed", 7,
                   "--output", tmp_path / f"{tag}.csv") == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.truth.json").read_bytes() == (tmp_path / "b.truth.json").read_bytes()
    data = io.read_dataset(tmp_path / "a.csv")
    assert len(data) == 293


def test_simulate_pentagon_and_custom(tmp_path):
    assert run("simulate", "--generator", "pentagon", "--output", tmp_path / "p.csv") == 0
    shapes = io.read_dataset(tmp_path / "p.csv")
    assert len(shapes) == 50 and shapes.k == 26
    assert run("simulate", "--generator", "custom", "--manifold", "preshape", "--k", 2,
               "--output", tmp_path / "c.csv") == 1
    assert run("simulate", "--generator", "custom", "--manifold", "sphere", "--dim", 4,
               "--q", 2, "--output", tmp_path / "c.csv") == 0
    assert io.read_dataset(tmp_path / "c.csv").X.shape == (100, 2)
    assert run("simulate", "--generator", "nope", "--output", tmp_path / "x.csv") == 1
    assert run("simulate", "--output", tmp_path / "missing" / "x.csv") == 1


def test_fit_sphere_and_refit(tmp_path):
    run("simulate", "--seed", 7, "--output", tmp_path / "s.csv")
    assert run("fit", "--input", tmp_path / "s.csv", "--output", tmp_path / "m.json") == 0
    rep = json.loads((tmp_path / "m.report.json").read_text())
    assert len(rep["pruned_columns"]) == 1 and rep["converged"]
    assert {"energy_trace", "iterations", "wall_time"} <= set(rep)
    assert run("fit", "--input", tmp_path / "s.csv", "--output", tmp_path / "m2.json",
               "--init", tmp_path / "m.json", "--report", tmp_path / "r2.json") == 0
    assert json.loads((tmp_path / "r2.json").read_text())["iterations"] <= 1


def test_fit_errors(tmp_path, capsys):
    bad = _write(tmp_path / "bad.csv", HEADER.replace("sphere", "torus"))
    assert run("fit", "--input", bad, "--output", tmp_path / "m.json") == 1
    assert "manifold" in capsys.readouterr().err
    assert run("fit", "--input", tmp_path / "none.csv", "--output", tmp_path / "m.json") == 1
    assert run("fit", "--bogus") == 1
    # a record at the antipode of the first prediction is a numerical failure
    rows = "0,0,0,1\n1,0,0.1,0.99498743710662\n0.5,0,0,-1\n"
    cut = _write(tmp_path / "cut.csv", HEADER + rows)
    init = tmp_path / "init.json"
    from geomreg.regression import GeodesicModel
    m = GeodesicModel(Sphere(3), [0, 0, 1.0], [[0, 0.0, 0]], 1.0, [0], [False], [0], [1],
                      mode="geodesic")
    io.write_model(init, m)
    assert run("fit", "--input", cut, "--output", tmp_path / "o.json", "--init", init,
               "--mode", "geodesic") == 2


def test_predict(tmp_path):
    run("simulate", "--generator", "pentagon", "--output", tmp_path / "p.csv")
    run("fit", "--input", tmp_path / "p.csv", "--output", tmp_path / "m.json", "--q", 10)
    assert run("predict", "--model", tmp_path / "m.json", "--covariates", "51:100",
               "--output", tmp_path / "pred.csv") == 0
    pred = io.read_dataset(tmp_path / "pred.csv")
    assert len(pred) == 50 and np.allclose(np.linalg.norm(pred.Y, axis=1), 1, atol=1e-12)
    outlines = io.read_dataset(tmp_path / "pred.landmarks.csv")
    assert len(outlines) == 50 and outlines.k == 26
    assert run("predict", "--model", tmp_path / "m.json", "--covariates", "1,2;3,4",
               "--output", tmp_path / "x.csv") == 1
    assert run("predict", "--model", tmp_path / "nope.json", "--covariates", "1",
               "--output", tmp_path / "x.csv") == 1


def test_predict_at_zero_is_reference(tmp_path):
    run("simulate", "--seed", 3, "--output", tmp_path / "s.csv")
    run("fit", "--input", tmp_path / "s.csv", "--output", tmp_path / "m.json", "--q", 1,
        "--mode", "geodesic")
    run("predict", "--model", tmp_path / "m.json", "--covariates", "0",
        "--output", tmp_path / "z.csv")
    model = io.read_model(tmp_path / "m.json")
    assert np.allclose(io.read_dataset(tmp_path / "z.csv").Y[0], model.intercept())


def test_evaluate(tmp_path):
    p = tmp_path / "p.csv"
    run("simulate", "--generator", "pentagon", "--output", p)
    assert run("evaluate", "--input", p, "--compare", "--q", 10,
               "--output", tmp_path / "e.tsv", "--report-json", tmp_path / "e.json") == 0
    head, rows = io.read_eval_table(tmp_path / "e.tsv")
    assert [r["model"] for r in rows] == ["linear", "geodesic", "bgrm"]
    assert "p_value" not in head
    assert json.loads((tmp_path / "e.json").read_text())["p_value"] is None


def test_evaluate_perfect_fit_and_permutations(tmp_path):
    d = tmp_path / "d.csv"
    run("simulate", "--generator", "custom", "--dim", 3, "--tau", 1e12, "--n", 30,
        "--output", d)
    run("fit", "--input", d, "--output", tmp_path / "m.json", "--mode", "geodesic")
    assert run("evaluate", "--input", d, "--model", tmp_path / "m.json",
               "--output", tmp_path / "e.tsv", "--permutations", 100) == 0
    head, rows = io.read_eval_table(tmp_path / "e.tsv")
    assert rows[0]["r_squared"] == pytest.approx(1.0, abs=1e-9)
    assert rows[0]["p_value"] == pytest.approx(1 / 101)
    assert run("evaluate", "--input", d, "--model", tmp_path / "m.json",
               "--output", tmp_path / "e.tsv", "--permutations", 5) == 1


def test_plots(tmp_path):
    run("simulate", "--seed", 1, "--output", tmp_path / "s.csv")
    run("fit", "--input", tmp_path / "s.csv", "--output", tmp_path / "m.json")
    for tag in "ab":
        assert run("plot", "--kind", "sphere-geodesic", "--input", tmp_path / "s.csv",
                   "--model", tmp_path / "m.json", "--truth", tmp_path / "s.truth.json",
                   "--output", tmp_path / f"{tag}.svg") == 0
    a = (tmp_path / "a.svg").read_bytes()
    assert a == (tmp_path / "b.svg").read_bytes() and a.startswith(b"<svg")
    assert run("plot", "--kind", "energy-trace", "--report", tmp_path / "m.report.json",
               "--output", tmp_path / "t.svg") == 0
    run("simulate", "--generator", "custom", "--dim", 5, "--output", tmp_path / "c.csv")
    assert run("plot", "--kind", "sphere-geodesic", "--input", tmp_path / "c.csv",
               "--output", tmp_path / "x.svg") == 1
    assert run("plot", "--kind", "pie", "--output", tmp_path / "x.svg") == 1


def test_dimension_bars_and_shape_sequence(tmp_path):
    run("simulate", "--generator", "pentagon", "--output", tmp_path / "p.csv")
    run("fit", "--input", tmp_path / "p.csv", "--output", tmp_path / "m.json", "--q", 10)
    assert run("plot", "--kind", "dimension-bars", "--model", tmp_path / "m.json",
               "--output", tmp_path / "d.svg") == 0
    svg = (tmp_path / "d.svg").read_text()
    retained = int(io.read_model(tmp_path / "m.json").active.sum())
    assert ">52</text>" in svg and f">{retained}</text>" in svg
    assert run("plot", "--kind", "shape-sequence", "--input", tmp_path / "p.csv",
               "--output", tmp_path / "s.svg") == 0
    svg = (tmp_path / "s.svg").read_text()
    assert svg.count("<polygon") == 50
    assert 'stroke="#0000ff"' in svg and 'stroke="#ff0000"' in svg
