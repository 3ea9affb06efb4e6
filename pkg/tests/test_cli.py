import json

import numpy as np

from meanfield.cli import run
from meanfield.io import matrix_to_json
from meanfield.linalg import partial_trace, reduced_state
from meanfield.io import pure_from_json, density_from_json


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def write_matrix(tmp_path, name, m):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(matrix_to_json(np.asarray(m, dtype=complex))))
    return str(path)


def test_region_caption(capsys):
    code, out, _ = call(capsys, "region", "--spectrum", "0.7,0.2,0.1,0")
    assert code == 0
    want = {"O": [0.5, 0.5], "A": [0.5, 0.3], "B": [0.3, 0.1], "C": [0.2, 0.1], "D": [0.15, 0.15]}
    for k, v in want.items():
        assert np.allclose(out["vertices"][k], v, atol=1e-12, rtol=0)
    assert len(out["polygon"]) == 8


def test_check_two_qubit_counterexample(capsys):
    code, out, _ = call(capsys, "check", "two-qubit", "--la", "0.4", "--lb", "0.5", "--spectrum", "0.3,0.3,0.3,0.1")
    assert code == 1
    assert out["compatible"] is False
    assert [v["index"] for v in out["violations"]] == [4]
    assert "min(lambda_1 - lambda_3, lambda_2 - lambda_4)" in out["violations"][0]["inequality"]


def test_check_qubits(capsys, tmp_path):
    code, out, _ = call(capsys, "check", "qubits", "--margins", "0.25,0.25,0.25")
    assert code == 0 and out == {"compatible": True, "violations": [], "margins": [0.25, 0.25, 0.25]}
    code, out, _ = call(capsys, "check", "qubits", "--margins", "[0.1, 0.3]")
    assert code == 1 and out["violations"][0]["index"] == 2
    f1 = write_matrix(tmp_path, "r1", np.diag([0.9, 0.1]))
    f2 = write_matrix(tmp_path, "r2", np.diag([0.8, 0.2]))
    code, out, _ = call(capsys, "check", "qubits", "--rho", f1, f2)
    assert code == 1


def test_check_conv_and_tripartite(capsys, tmp_path):
    code, out, _ = call(capsys, "check", "conv", "--spec-a", "0.6,0.4", "--spec-b", "0.5,0.5", "--lambda", "0.3,0.3,0.3,0.1")
    assert code == 0 and np.allclose(np.sum(out["table"], axis=1), [0.6, 0.4])
    fa = write_matrix(tmp_path, "a", np.diag([0.6, 0.4]))
    fb = write_matrix(tmp_path, "b", np.diag([0.5, 0.5]))
    fc = write_matrix(tmp_path, "c", np.diag([0.3, 0.3, 0.3, 0.1]))
    code, out, _ = call(capsys, "check", "tripartite", "--rho-a", fa, "--rho-b", fb, "--rho-c", fc)
    assert code == 1
    assert out["necessary"] == [True, True, True]
    assert out["pure_224"] is False and out["pure_224_violations"][0]["index"] == 4


def test_witnesses(capsys, tmp_path):
    code, out, _ = call(capsys, "witness", "qubits", "--margins", "0.25,0.25,0.25")
    assert code == 0 and out["report"]["margin_residual"] <= 1e-8
    psi = pure_from_json(out["state"])
    assert np.allclose(reduced_state(psi, [0]).matrix, np.diag([0.75, 0.25]), atol=1e-10)

    code, out, _ = call(capsys, "witness", "two-qubit", "--la", "0.3", "--lb", "0.2", "--spectrum", "0.7,0.2,0.1,0")
    assert code == 0 and max(out["report"].values()) <= 1e-8
    rho = density_from_json(out["state"])
    assert rho.dims == (2, 2)

    code, out, _ = call(capsys, "witness", "two-qubit", "--la", "0.4", "--lb", "0.5", "--spectrum", "0.3,0.3,0.3,0.1")
    assert code == 1 and out["compatible"] is False

    u = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    fa = write_matrix(tmp_path, "a", u @ np.diag([0.7, 0.3]) @ u)
    fb = write_matrix(tmp_path, "b", np.diag([0.6, 0.4]))
    fc = write_matrix(tmp_path, "c", np.diag([0.5, 0.3, 0.2, 0.0]))
    code, out, _ = call(capsys, "witness", "pure-224", "--rho-a", fa, "--rho-b", fb, "--rho-c", fc)
    assert code == 0, out
    psi = pure_from_json(out["state"])
    assert np.allclose(reduced_state(psi, [0]).matrix, u @ np.diag([0.7, 0.3]) @ u, atol=1e-7)

    code, out, _ = call(capsys, "witness", "separable", "--rho-a", fa, "--rho-b", fb, "--lambda", "0.5,0.3,0.2,0")
    assert code == 0
    rho = density_from_json(out["state"])
    assert np.allclose(partial_trace(rho, [0]).matrix, u @ np.diag([0.7, 0.3]) @ u, atol=1e-8)

    fx = write_matrix(tmp_path, "x", np.diag([1.0, 0.0]))
    code, out, _ = call(capsys, "witness", "separable", "--rho-a", fx, "--rho-b", fx, "--lambda", "0.25,0.25,0.25,0.25")
    assert code == 1


def test_errors_exit_2(capsys, tmp_path):
    code, out, err = call(capsys, "check", "qubits", "--margins", "0.7")
    assert code == 2 and out is None and json.loads(err)["error"] == "ContractViolation"
    code, _, err = call(capsys, "region", "--spectrum", "0.5,0.5", "--tol", "bogus=1")
    assert code == 2 and "bogus" in json.loads(err)["message"]
    code, _, err = call(capsys, "nonsense")
    assert code == 2 and json.loads(err)["error"] == "UsageError"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dims": [2], "re": [[1.5, 0], [0, -0.5]], "im": [[0, 0], [0, 0]]}))
    code, _, err = call(capsys, "check", "qubits", "--rho", str(bad))
    assert code == 2 and "positivity" in json.loads(err)["message"]


def test_witness_failure_exits_2(capsys, monkeypatch):
    import meanfield.cli as cli

    def broken(rho, q):
        return {"spectrum": 1.0}

    monkeypatch.setattr(cli, "witness_residuals", broken)
    code, out, err = call(capsys, "witness", "two-qubit", "--la", "0.3", "--lb", "0.2", "--spectrum", "0.7,0.2,0.1,0")
    assert code == 2 and out is None
    assert json.loads(err)["error"] == "WitnessFailure"


def test_tol_override_changes_verdict(capsys):
    code, _, _ = call(capsys, "check", "qubits", "--margins", "0.3,0.1,0.1999")
    assert code == 1
    code, _, _ = call(capsys, "check", "qubits", "--margins", "0.3,0.1,0.1999", "--tol", "maj=1e-3")
    assert code == 0


def test_output_file_and_determinism(capsys, tmp_path):
    target = tmp_path / "o.json"
    argv = ["oracle", "supf", "--n", "2", "--restarts", "5", "--seed", "3"]
    assert run(argv + ["--output", str(target)]) == 0
    first = target.read_text()
    assert run(argv + ["--output", str(target)]) == 0
    assert target.read_text() == first
    out = json.loads(first)
    assert all(r["delta"] <= 1e-6 for r in out["results"])


def test_oracles(capsys):
    code, out, _ = call(capsys, "oracle", "info", "--n", "2", "--restarts", "10")
    assert code == 0 and all(abs(r["delta"]) <= 1e-4 for r in out["results"])
    code, out, _ = call(capsys, "oracle", "sample", "--n", "200")
    assert code == 0 and out["results"][0]["worst_violation"] <= 1e-9
    code, out, _ = call(capsys, "oracle", "sample", "--n", "200", "--qubits", "4")
    assert code == 0


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "meanfield", "check", "qubits", "--margins", "0.25,0.25,0.25"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["compatible"] is True
