import json

import numpy as np
import pytest

from cmcbjorling.cli import main
from cmcbjorling.meshfile import read_obj
from cmcbjorling.grid import DomainGrid


def load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def test_solve_cylinder(tmp_path):
    assert main(["solve", "--example", "cylinder", "--grid", "41,17", "--out", str(tmp_path)]) == 0
    rep = load(tmp_path / "report.json")
    assert rep["passed"] and rep["cmc_residual"] < 1e-3
    grid = DomainGrid.from_json(rep["metadata"]["grid"])
    s = read_obj(tmp_path / "surface.obj", grid, rep["metadata"])
    # the unit-H cylinder has radius 1/2 around the x1 axis through (0, 0, 0)
    r = np.hypot(s.points[..., 1], s.points[..., 2])
    assert np.allclose(r, 0.5, atol=1e-10)


def test_solve_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["solve", "--example", "line_theta_2x", "--grid", "21,9", "--out", str(d)]) == 0
    for name in ("surface.obj", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_potential_mode(tmp_path):
    assert main(["potential", "--example", "delaunay_circle", "--H", "0.75",
                 "--out", str(tmp_path)]) == 0
    pot = load(tmp_path / "potential.json")["potential"]
    text = json.dumps(pot)
    assert "-0.75" in text or "-3/4" in text


def test_verify_round_trip(tmp_path):
    solve = tmp_path / "solve"
    assert main(["solve", "--example", "cylinder", "--grid", "41,17", "--out", str(solve)]) == 0
    args = ["verify", "--obj", str(solve / "surface.obj"), "--meta", str(solve / "report.json")]
    assert main(args + ["--out", str(tmp_path / "ok")]) == 0
    assert load(tmp_path / "ok" / "verify_report.json")["passed"]
    # wrong mean curvature fails verification
    assert main(args + ["--H", "0.8", "--out", str(tmp_path / "bad")]) == 4


def test_example_listing(capsys):
    assert main(["example"]) == 0
    out = capsys.readouterr().out
    for name in ("cylinder", "delaunay_circle", "planar_circle", "two_param_sphere"):
        assert name in out
    assert main(["example", "line_theta_xsq"]) == 0
    item = json.loads(capsys.readouterr().out)
    assert item["v"][1] == "cos(z**2)"


def test_family_sweep(tmp_path):
    code = main(["family", "--example", "delaunay_circle", "--values", "0.5,1.0",
                 "--grid", "41,17", "--out", str(tmp_path)])
    assert code == 0
    fam = load(tmp_path / "family.json")
    assert fam["parameter"] == "H" and [m["value"] for m in fam["members"]] == [0.5, 1.0]
    assert (tmp_path / "surface_H_0.5.obj").exists()


def test_toml_config(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('curve = ["2*z", "0", "0"]\nv = ["0", "cos(2*z)", "sin(2*z)"]\nH = 1.0\n'
                   'J = [-0.5, 0.5]\n[grid]\nnx = 21\nny = 9\ny_max = 0.3\n')
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rep = load(tmp_path / "o" / "report.json")
    assert rep["metadata"]["config"]["data"]["curve"] == ["2*z", "0", "0"]


@pytest.mark.parametrize("argv", [
    ["solve", "--example", "nonexistent"],
    ["solve", "--example", "cylinder", "--H", "0"],
    ["solve", "--example", "cylinder", "--degree", "1"],
    ["verify", "--obj", "missing.obj"],
])
def test_configuration_errors(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert load(tmp_path / "error.json")["exit_code"] == 2


def test_numeric_failure_exit_code(tmp_path):
    cfg = tmp_path / "bad.json"
    # theta = 1/(z^2 + 0.04) has poles at +-0.2i inside the strip
    cfg.write_text(json.dumps({"curve": ["z", "0", "0"],
                               "v": ["0", "cos(1/(z^2+0.04))", "sin(1/(z^2+0.04))"],
                               "J": [-0.5, 0.5], "grid": {"nx": 21, "ny": 9, "y_max": 0.4}}))
    assert main(["solve", "--config", str(cfg), "--H", "1", "--out", str(tmp_path)]) == 3
    assert load(tmp_path / "error.json")["exit_code"] == 3
