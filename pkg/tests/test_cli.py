import json

import numpy as np
import pytest

from orbit_locator import SolverFailure, cli


DIAG_BASIS = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]


def write_problem(tmp_path, name="p.json", **fields):
    path = tmp_path / name
    path.write_text(json.dumps(fields))
    return str(path)


def diag_problem(tmp_path, **extra):
    fields = {"dim": 2, "basis": DIAG_BASIS, "x": [1.0, 0.1],
              "y": [0.0, 1.0]}
    fields.update(extra)
    return write_problem(tmp_path, **fields)


def run_cli(capsys, argv):
    code = cli.run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_distance_roundtrip(tmp_path, capsys):
    path = diag_problem(tmp_path, budget=12, seed=7)
    code, out, err = run_cli(capsys, ["distance", path, "--validate"])
    assert code == 0 and err == ""
    report = json.loads(out)
    assert report["status"] == "ok"
    assert report["verdict"]["kind"] == "Stabilized"
    assert report["verdict"]["N"] == 10
    assert report["seed"] == 7
    # 17 significant digits keep doubles lossless
    assert "0.10000000000000001" in out


def test_byte_identical_reruns(tmp_path, capsys):
    path = diag_problem(tmp_path, budget=12)
    _, out1, _ = run_cli(capsys, ["distance", path])
    _, out2, _ = run_cli(capsys, ["distance", path])
    assert out1 == out2


def test_balldist(tmp_path, capsys):
    path = diag_problem(tmp_path)
    code, out, _ = run_cli(capsys, ["balldist", path, "--n", "21",
                                    "--validate"])
    assert code == 0
    report = json.loads(out)
    assert abs(report["d"]) <= 1e-6
    code2, _, err2 = run_cli(capsys, ["balldist", path])
    assert code2 == 1 and "needs a ball level" in err2


def test_project_projects_on_first_axis(tmp_path, capsys):
    path = write_problem(tmp_path, dim=2, basis=DIAG_BASIS, x=[1.0, 0.0])
    code, out, _ = run_cli(capsys, ["project", path, "--validate"])
    assert code == 0
    report = json.loads(out)
    assert np.allclose(report["P"], [[1.0, 0.0], [0.0, 0.0]], atol=1e-10)
    assert report["rank"] == 1


def test_radius_and_refusal(tmp_path, capsys):
    path = diag_problem(tmp_path)
    code, out, _ = run_cli(capsys, ["radius", path, "--validate"])
    assert code == 0
    assert abs(json.loads(out)["r"] - 0.1) <= 1e-8
    zero = write_problem(tmp_path, name="z.json", dim=2, basis=DIAG_BASIS,
                         x=[0.0, 0.0])
    code2, out2, _ = run_cli(capsys, ["radius", zero])
    assert code2 == 2
    report = json.loads(out2)
    assert report["status"] == "refused" and report["radius"] == 0.0


def test_decompose(tmp_path, capsys):
    path = write_problem(tmp_path, dim=2, basis=DIAG_BASIS, x=[1.0, 1.0],
                         y=[0.3, 0.1])
    code, out, _ = run_cli(capsys, ["decompose", path, "--r", "1.0",
                                    "--validate"])
    assert code == 0
    report = json.loads(out)
    assert report["outcome"]["kind"] == "Member"
    assert np.allclose(report["outcome"]["xi"], [0.3, 0.1], atol=1e-6)
    code2, _, err2 = run_cli(capsys, ["decompose", path])
    assert code2 == 1 and "--r" in err2


def test_omt(tmp_path, capsys):
    path = write_problem(tmp_path, dim=2, basis=[[[2.0, 0.0], [0.0, 0.5]]],
                         x=[0.0, 0.0])
    code, out, _ = run_cli(capsys, ["omt", path, "--validate"])
    assert code == 0
    assert abs(json.loads(out)["r"] - 0.5) <= 1e-9
    sing = write_problem(tmp_path, name="s.json", dim=2,
                         basis=[[[1.0, 0.0], [2.0, 0.0]]], x=[0.0, 0.0])
    code2, _, err2 = run_cli(capsys, ["omt", sing])
    assert code2 == 1 and "row rank" in err2


def test_demo_csv(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    code, out, _ = run_cli(capsys, ["demo", "--csv", str(csv_path),
                                    "--validate"])
    assert code == 0
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "c,r,N,d,levels,verdict"
    assert len(lines) == 12
    assert lines[1].startswith("0,0,n/a,1")
    assert len(out.strip().split("\n")) == 12


def test_input_errors(tmp_path, capsys):
    assert run_cli(capsys, ["nosuch"])[0] == 1
    assert run_cli(capsys, [])[0] == 1
    broken = tmp_path / "broken.json"
    broken.write_text('{"dim": 2')
    assert run_cli(capsys, ["project", str(broken)])[0] == 1
    bad_shape = write_problem(tmp_path, name="b.json", dim=2,
                              basis=DIAG_BASIS, x=[1.0, 2.0, 3.0])
    code, _, err = run_cli(capsys, ["project", bad_shape])
    assert code == 1 and "shape" in err
    extra = write_problem(tmp_path, name="e.json", dim=2, basis=DIAG_BASIS,
                          x=[1.0, 0.0], zz=1)
    code2, _, err2 = run_cli(capsys, ["project", extra])
    assert code2 == 1 and "unknown fields" in err2
    missing = write_problem(tmp_path, name="m.json", dim=2, basis=DIAG_BASIS)
    assert run_cli(capsys, ["project", missing])[0] == 1


def test_solver_failure_exit_code(tmp_path, capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise SolverFailure("stalled", lower=0.1, upper=0.2, iterations=9)

    monkeypatch.setattr(cli.nested, "locate_distance", boom)
    path = diag_problem(tmp_path)
    code, out, _ = run_cli(capsys, ["distance", path])
    assert code == 3
    report = json.loads(out)
    assert report["status"] == "solver-failure"
    assert report["lower"] == 0.1 and report["upper"] == 0.2


def test_flag_overrides_file_tol(tmp_path, capsys):
    path = diag_problem(tmp_path, tol=1e-3, budget=12)
    _, out, _ = run_cli(capsys, ["distance", path])
    assert json.loads(out)["verdict"]["kind"] == "Located"
    _, out2, _ = run_cli(capsys, ["distance", path, "--tol", "1e-6"])
    assert json.loads(out2)["verdict"]["kind"] == "Stabilized"
