import json
import os
import subprocess
import sys

import numpy as np
import pytest

from riskgeom import cli


@pytest.fixture
def square_csv(tmp_path):
    p = tmp_path / "sq.csv"
    p.write_text("x,y\n0,0\n1,0\n0,1\n1,1\n")
    return p


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def compute(argv, capsys):
    code, out, err = run(["compute", *argv], capsys)
    assert code == 0, err
    return json.loads(out)


class TestCompute:
    def test_square(self, square_csv, capsys):
        rep = compute(["--input", square_csv, "--alpha", "0.5"], capsys)
        lev = rep["levels"][0]
        assert lev["risk_point"] == [0.0, 0.0]
        assert lev["acceptable"] is True
        assert rep["input"]["m"] == 4 and rep["directions"] == 64

    def test_level_one_is_mean(self, square_csv, capsys):
        rep = compute(["--input", square_csv, "--alpha", "1"], capsys)
        np.testing.assert_allclose(rep["levels"][0]["risk_point"], [-0.5, -0.5], atol=1e-15)

    def test_shear_cone(self, square_csv, tmp_path, capsys):
        cone = tmp_path / "cone.json"
        cone.write_text(json.dumps({"A": [[1, 0], [1, 1]]}))
        rep = compute(["--input", square_csv, "--alpha", "0.5", "--cone", cone], capsys)
        np.testing.assert_allclose(rep["levels"][0]["risk_point"], [0.0, -0.5], atol=1e-12)

    def test_marginals(self, square_csv, capsys):
        rep = compute(["--input", square_csv, "--alpha", "0.5", "0.3", "--risk", "es", "em", "var"], capsys)
        a, b = rep["levels"]
        assert "risk_point" not in a
        assert a["marginal_risks"]["em"] == [-0.25, -0.25]
        assert b["marginal_risks"]["em"] == [None, None]  # 1/0.3 is not a whole number of copies
        assert a["marginal_risks"]["es"] == [0.0, 0.0]

    def test_ech_copies(self, square_csv, capsys):
        rep = compute(["--input", square_csv, "--family", "ech", "--n", "2"], capsys)
        assert rep["levels"][0]["alpha"] == 0.5

    def test_three_dimensions(self, tmp_path, capsys):
        p = tmp_path / "c.csv"
        p.write_text("a,b,c\n0,0,0\n1,2,3\n2,0,1\n")
        rep = compute(["--input", p, "--alpha", "0.4", "--directions", "5"], capsys)
        # +-e_i plus five random directions and their negatives
        assert rep["directions"] == 16

    def test_env_seed(self, tmp_path, capsys, monkeypatch):
        p = tmp_path / "c.csv"
        p.write_text("a,b,c\n0,0,0\n1,2,3\n2,0,1\n")
        monkeypatch.setenv("RISKGEOM_SEED", "42")
        assert compute(["--input", p, "--alpha", "0.4", "--seed", "1"], capsys)["seed"] == 42

    def test_byte_identical(self, square_csv, tmp_path, capsys):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert run(["compute", "--input", square_csv, "--alpha", "0.3", "0.7", "--output", out], capsys)[0] == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]


class TestErrors:
    def test_missing_input(self, tmp_path, capsys):
        code, _, err = run(["compute", "--input", tmp_path / "nope.csv", "--alpha", "0.5"], capsys)
        assert code == cli.EXIT_DATA and "--input" in err

    def test_bad_level(self, square_csv, capsys):
        code, _, err = run(["compute", "--input", square_csv, "--alpha", "2"], capsys)
        assert code == cli.EXIT_CONFIG and "level" in err

    def test_bad_cell(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("x,y\n1,2\n3,zz\n")
        code, _, err = run(["compute", "--input", p, "--alpha", "0.5"], capsys)
        assert code == cli.EXIT_DATA and "row 3, column 2" in err

    def test_bad_cone(self, square_csv, tmp_path, capsys):
        cone = tmp_path / "cone.json"
        cone.write_text(json.dumps({"A": [[1, 1], [1, 1]]}))
        code, _, err = run(["compute", "--input", square_csv, "--alpha", "0.5", "--cone", cone], capsys)
        assert code == cli.EXIT_CONFIG and "--cone" in err

    def test_env_seed_must_be_integer(self, square_csv, capsys, monkeypatch):
        monkeypatch.setenv("RISKGEOM_SEED", "abc")
        assert run(["compute", "--input", square_csv, "--alpha", "0.5"], capsys)[0] == cli.EXIT_CONFIG

    def test_copies_need_ech(self, square_csv, capsys):
        assert run(["compute", "--input", square_csv, "--n", "2"], capsys)[0] == cli.EXIT_CONFIG

    def test_svg_needs_plane(self, tmp_path, capsys):
        p = tmp_path / "c.csv"
        p.write_text("a,b,c\n0,0,0\n1,2,3\n")
        out, svg = tmp_path / "r.json", tmp_path / "r.svg"
        code = run(["compute", "--input", p, "--alpha", "0.5", "--output", out, "--svg", svg], capsys)[0]
        assert code == cli.EXIT_CONFIG
        assert not out.exists() and not svg.exists()


class TestAxioms:
    def test_es_clean(self, tmp_path, capsys):
        out = tmp_path / "ax.json"
        code, _, _ = run(["axioms", "--risk", "es", "--seed", "7", "--trials", "100", "--output", out], capsys)
        assert code == cli.EXIT_OK
        rep = json.loads(out.read_text())
        assert all(a["violation_count"] == 0 for a in rep["suites"][0]["axioms"])

    def test_unknown(self, capsys):
        assert run(["axioms", "--risk", "median"], capsys)[0] == cli.EXIT_CONFIG
        assert run(["axioms", "--risk", "es", "--trials", "0"], capsys)[0] == cli.EXIT_CONFIG


class TestSvg:
    def test_singleton_dot(self, square_csv, tmp_path, capsys):
        svg = tmp_path / "one.svg"
        run(["compute", "--input", square_csv, "--alpha", "1", "--svg", svg], capsys)
        text = svg.read_text()
        assert 'r="0.01"' in text

    def test_zonoid_polygon_in_square(self, square_csv, tmp_path, capsys):
        rep = tmp_path / "r.json"
        svg = tmp_path / "r.svg"
        assert run(["compute", "--input", square_csv, "--alpha", "0.5", "--output", rep], capsys)[0] == 0
        assert run(["svg", "--region", rep, "--output", svg], capsys)[0] == 0
        text = svg.read_text()
        assert text.startswith("<svg") or text.startswith("<?xml")
        shapes = cli._shapes_from_json(json.loads(rep.read_text()))
        verts = np.concatenate([np.asarray(v) for v, _ in shapes])
        assert verts.min() >= -1e-9 and verts.max() <= 1 + 1e-9

    def test_halfspace(self, square_csv, tmp_path, capsys):
        svg = tmp_path / "h.svg"
        code = run(["compute", "--input", square_csv, "--family", "halfspace", "--alpha", "0.3", "--svg", svg], capsys)[0]
        assert code == 0 and "<path" in svg.read_text()

    def test_bad_region_file(self, tmp_path, capsys):
        p = tmp_path / "x.json"
        p.write_text("{not json")
        assert run(["svg", "--region", p, "--output", tmp_path / "o.svg"], capsys)[0] == cli.EXIT_CONFIG
        p.write_text('{"foo": 1}')
        assert run(["svg", "--region", p, "--output", tmp_path / "o.svg"], capsys)[0] == cli.EXIT_CONFIG


def test_module_entry_point(square_csv):
    res = subprocess.run(
        [sys.executable, "-m", "riskgeom", "compute", "--input", str(square_csv), "--alpha", "0.5"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["levels"][0]["risk_point"] == [0.0, 0.0]
