import json

import pytest

from qcurv.cli import THREADS_ENV, main

W_MINUS_ONE = {"n": 4, "profile": {"type": "analytic",
                                   "terms": [{"kind": "log1p_sq", "c": -0.5, "rho": 1.0}]}}
CYLINDER = {"n": 4, "profile": {"type": "analytic", "punctured_origin": True,
                                "terms": [{"kind": "log", "c": -1.0}]}}
FLAT = {"n": 4, "profile": {"type": "analytic", "terms": []}}
PERTURBED = {**W_MINUS_ONE, "angular": {"mode": "cos2", "eps": 0.01}}


@pytest.fixture
def profile_file(tmp_path):
    def write(doc, name="p.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return write


def run_json(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_gbc_verify_equality(profile_file, capsys):
    code, out = run_json(capsys, "gbc-verify", "--input", profile_file(W_MINUS_ONE))
    res = out["result"]
    assert code == 0
    assert res["total"] == pytest.approx(1.0, abs=1e-3)
    assert res["verdict"] == "satisfied" and res["equality_observed"]
    assert out["seed"] == 0 and "calibration" in out and "quadrature" in out


def test_gbc_verify_cylinder(profile_file, capsys):
    code, out = run_json(capsys, "gbc-verify", "--input", profile_file(CYLINDER))
    assert code == 0
    assert out["result"]["total"] == pytest.approx(0.0, abs=1e-3)
    assert out["result"]["bound"] == 0.0


def test_curvature_flat_is_zero(profile_file, capsys):
    code, out = run_json(capsys, "curvature", "--input", profile_file(FLAT), "--radii", "0.5,1,2")
    assert code == 0
    for frame in out["result"]:
        assert frame["R"] == 0.0 and frame["Q"] == 0.0 and frame["J"] == 0.0


def test_csv_output(profile_file, capsys):
    assert main(["levelset", "--input", profile_file(W_MINUS_ONE), "--format", "csv",
                 "--levels", "0.5,0.7"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if not ln.startswith("#")]
    assert lines[0] == "lambda,F,lhs,rhs,defect"
    assert len(lines) == 3


def test_output_file_and_determinism(profile_file, tmp_path, capsys):
    path = profile_file(W_MINUS_ONE)
    outs = []
    for k in range(2):
        target = tmp_path / f"out{k}.json"
        assert main(["ends", "--input", path, "--output", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    ends = json.loads(outs[0])["result"]["ends"]
    assert ends[0]["completeness"] == "complete" and ends[0]["borderline"]


def test_symmetrize(profile_file, capsys):
    code, out = run_json(capsys, "symmetrize", "--input", profile_file(PERTURBED))
    assert code == 0
    assert out["result"]["shell_ok"] and out["result"]["sign_preserved"]


def test_kernels(profile_file, capsys):
    code, out = run_json(capsys, "kernels", "--input", profile_file(W_MINUS_ONE), "--grid", "8")
    assert code == 0
    assert out["result"]["structure"]["residual"] < 1e-8


@pytest.mark.parametrize("doc", ["{not json", json.dumps({"n": 3, "profile": {}}),
                                 json.dumps({"n": 4, "profile": {"type": "analytic",
                                                                 "terms": [{"kind": "log",
                                                                            "c": 1.0}]}})])
def test_bad_input_exits_2(profile_file, capsys, doc):
    assert main(["curvature", "--input", profile_file(doc)]) == 2
    assert "invalid input" in capsys.readouterr().err


def test_missing_input_and_bad_dimension(profile_file, capsys):
    assert main(["ends"]) == 2
    assert main(["ends", "--input", profile_file(W_MINUS_ONE), "--n", "5"]) == 2


def test_bad_thread_count(profile_file, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(SystemExit) as exc:
        main(["ends", "--input", profile_file(W_MINUS_ONE)])
    assert exc.value.code == 2
