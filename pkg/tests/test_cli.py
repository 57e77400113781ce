import json
import subprocess
import sys

import pytest

from mdkern.cli import run


@pytest.fixture
def files(tmp_path, star_d, star_dsq, line_sq):
    def dump(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return {
        "d": dump("d.json", star_d.to_dict()),
        "dsq": dump("dsq.json", star_dsq.to_dict()),
        "line": dump("line.json", line_sq.to_dict()),
        "bad": dump("bad.json", {"labels": ["a", "b"], "values": [[0, 1], [2, 0]]}),
        "tri": dump("tri.json", {"labels": ["a", "b", "c"], "points": [[0, 0], [1, 0], [0.5, 0.8660254037844386]]}),
        "tree": dump("tree.json", {"root": "4", "edges": [["4", "1", 1], ["4", "2", "1/2"], ["4", "3", 1]]}),
        "rep": dump("rep.json", {"labels": ["1", "2", "3", "4"], "atoms": [
            {"pattern": "1000", "weight": 1}, {"pattern": "0100", "weight": 1}, {"pattern": "0010", "weight": 1}]}),
        "c3": dump("c3.json", {"labels": ["0", "1", "2"], "values": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}),
        "nan": str(tmp_path / "nan.json"),
        "dir": tmp_path,
    }


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_negdef(capsys, files):
    code, out, _ = call(capsys, "negdef", "--in", files["dsq"])
    assert code == 3
    data = json.loads(out)
    assert data["negative_definite"] is False
    assert data["witness"] == {"coefficients": [1, 1, 1, -3], "value": 6.0}
    code, out, _ = call(capsys, "negdef", "--in", files["d"])
    assert code == 0 and json.loads(out)["negative_definite"] is True


def test_pseudometric(capsys, files):
    code, out, _ = call(capsys, "pseudometric", "--in", files["line"])
    assert code == 3
    assert json.loads(out)["violation"] == ["0", "1", "2"]
    assert call(capsys, "pseudometric", "--in", files["d"])[0] == 0


def test_embed(capsys, files):
    code, out, _ = call(capsys, "embed", "--in", files["line"])
    assert code == 0
    pts = json.loads(out)["points"]
    assert [abs(round(p[0], 9)) for p in pts] == [0, 1, 2]
    code, out, _ = call(capsys, "embed", "--in", files["dsq"])
    assert code == 3
    assert json.loads(out)["eigenvalue"] < 0


def test_crofton(capsys, files):
    code, out, _ = call(capsys, "crofton", "--config", files["tri"], "--pos", "a", "--neg", "b,c")
    assert code == 0
    data = json.loads(out)
    assert data["method"] == "quadrature-2d"
    assert abs(data["value"] - 0.5) < 1e-9
    code, out, _ = call(capsys, "crofton", "--config", files["tri"])
    assert code == 0
    assert len(json.loads(out)["cylinders"]) == 6
    code, _, err = call(capsys, "crofton", "--config", files["tri"], "--pos", "a", "--neg", "a")
    assert code == 4 and "mdkern:" in err


def test_sqrt_rep(capsys, files):
    code, out, _ = call(capsys, "sqrt-rep", "--in", files["line"])
    assert code == 0
    assert {a["pattern"] for a in json.loads(out)["atoms"]} == {"100", "110", "011", "001"}
    assert call(capsys, "sqrt-rep", "--in", files["dsq"])[0] == 4


def test_decompose(capsys, files):
    code, out, _ = call(capsys, "decompose", "--in", files["d"])
    assert code == 0 and json.loads(out)["feasible"] is True
    code, out, _ = call(capsys, "decompose", "--in", files["line"], "--exact")
    assert code == 3
    data = json.loads(out)
    assert data["feasible"] is False and len(data["pair_weights"]) == 3
    assert call(capsys, "decompose", "--in", files["d"], "--cap", "3")[0] == 4


def test_kernel_of(capsys, files):
    code, out, _ = call(capsys, "kernel-of", "--in", files["rep"])
    assert code == 0
    assert json.loads(out)["values"][0] == [0, 2, 2, 1]


def test_tree(capsys, files):
    code, out, _ = call(capsys, "tree", "--in", files["tree"], "--representation")
    assert code == 0
    data = json.loads(out)
    assert data["kernel"]["values"][0] == [0, "3/2", 2, 1]
    assert len(data["representation"]["points"]) == 3


def test_defect_and_growth(capsys, files):
    code, out, _ = call(capsys, "defect", "--set", "ge1", "--k", "0")
    assert code == 0 and json.loads(out)["defect"] == 0
    assert json.loads(call(capsys, "defect", "--set", "ge1", "--k", "-5")[1])["defect"] == 5
    code, out, _ = call(capsys, "growth", "--gens", "+2,-3", "--radius", "4", "--csv", "-")
    assert code == 0
    assert out.splitlines() == ["length,max_defect", "1,3", "2,6", "3,9", "4,12"]
    target = files["dir"] / "g.csv"
    assert call(capsys, "growth", "--gens", "+1", "--radius", "3", "--csv", str(target))[0] == 0
    assert target.read_text().splitlines()[-1] == "3,3"
    assert call(capsys, "defect", "--set", "gt1", "--k", "1")[0] == 4


def test_invariance(capsys, files):
    code, out, _ = call(capsys, "invariance", "--in", files["c3"], "--group", "cyclic:3", "--g", "1",
                        "--pos", "0", "--neg", "1,2")
    assert code == 0
    assert json.loads(out)["agree"] is True
    code, _, _ = call(capsys, "invariance", "--in", files["line"], "--group", "cyclic:3", "--g", "1",
                      "--pos", "0", "--neg", "1")
    assert code == 4


def test_solver_failure_exit_code(capsys, files, monkeypatch):
    from mdkern import cutcone
    from mdkern.errors import SolverError

    def boom(*args, **kwargs):
        raise SolverError("pivot budget exhausted")

    monkeypatch.setattr(cutcone, "decompose", boom)
    code, _, err = call(capsys, "decompose", "--in", files["d"])
    assert code == 5 and "pivot budget" in err


def test_usage_errors(capsys, files):
    assert call(capsys)[0] == 2
    assert call(capsys, "bogus")[0] == 2
    assert call(capsys, "negdef")[0] == 2
    assert call(capsys, "growth", "--gens", "+1", "--radius", "0")[0] == 2


def test_validation_errors(capsys, files):
    (files["dir"] / "nan.json").write_text('{"labels": ["a", "b"], "values": [[0, NaN], [NaN, 0]]}')
    assert call(capsys, "negdef", "--in", files["bad"])[0] == 4
    assert call(capsys, "negdef", "--in", files["nan"])[0] == 4
    assert call(capsys, "negdef", "--in", str(files["dir"] / "missing.json"))[0] == 4


def test_out_file(capsys, files):
    target = files["dir"] / "out.json"
    code, out, _ = call(capsys, "negdef", "--in", files["d"], "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["negative_definite"] is True


def test_console_script_is_deterministic(files):
    cfg = files["dir"] / "tri3.json"
    cfg.write_text(json.dumps({"labels": ["a", "b", "c"], "points": [[0, 0, 0], [1, 0, 0], [0, 1, 1]]}))
    argv = [sys.executable, "-m", "mdkern.cli", "crofton", "--config", str(cfg), "--samples", "20000", "--seed", "4"]
    a = subprocess.run(argv, capture_output=True, check=True)
    b = subprocess.run(argv, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout


def test_seed_from_environment(files, monkeypatch):
    cfg = files["dir"] / "tri3.json"
    cfg.write_text(json.dumps({"labels": ["a", "b", "c"], "points": [[0, 0, 0], [1, 0, 0], [0, 1, 1]]}))
    argv = [sys.executable, "-m", "mdkern.cli", "crofton", "--config", str(cfg), "--pos", "a", "--neg", "b",
            "--samples", "2000"]
    env_out = subprocess.run(argv, capture_output=True, check=True, env={"MDKERN_SEED": "9", "PATH": ""}).stdout
    flag_out = subprocess.run(argv + ["--seed", "9"], capture_output=True, check=True).stdout
    assert json.loads(env_out)["seed"] == 9
    assert env_out == flag_out
