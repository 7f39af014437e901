import json
import locale
import math

import jsonschema
import numpy as np
import pytest

from fbnorm import CanonicalParams, DataValidationError, sample_fb
from fbnorm.cli import main
from fbnorm.io import format_csv, project_to_sphere, read_data_csv, report_schema, write_atomic


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    report = json.loads(out)
    jsonschema.validate(report, report_schema())
    assert report["exit_code"] == code
    return code, report


@pytest.fixture
def param_file(tmp_path):
    def _write(doc, name="params.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return _write


def test_normconst_table_value(capsys, param_file):
    code, report = run(capsys, "normconst", param_file({"theta": [0, 1, 2, 5], "gamma": [0, 0, 0, 0]}), "--d", "1")
    assert code == 0
    assert report["outputs"]["value"] == pytest.approx(4.238950, abs=1e-6)
    assert report["outputs"]["imag_residual"] < 1e-8
    assert report["schema_version"] == 1 and report["tool_version"]


def test_normconst_uniform_and_log_only(capsys, param_file):
    path = param_file({"theta": [0, 0, 0], "gamma": [0, 0, 0]})
    code, report = run(capsys, "normconst", path)
    assert report["outputs"]["value"] == pytest.approx(12.566371, abs=1e-6)
    code, report = run(capsys, "normconst", path, "--log-only")
    assert "value" not in report["outputs"]
    assert report["outputs"]["log_value"] == pytest.approx(math.log(4 * math.pi))


def test_normconst_mean_covariance_input(capsys, param_file):
    code, report = run(capsys, "normconst", param_file({"mu": [0, 0, 0], "sigma": np.eye(3).tolist()}))
    assert code == 0
    # theta = 1/2 everywhere: exp(-1/2) * 4 pi
    assert report["outputs"]["value"] == pytest.approx(math.exp(-0.5) * 4 * math.pi, rel=1e-12)


def test_malformed_json_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{theta: [0, 1")
    code, report = run(capsys, "normconst", bad)
    assert code == 1
    assert "malformed" in report["error"]


def test_unknown_flag_is_usage_error(capsys):
    assert main(["normconst", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_accuracy_gate_exit_code(capsys, param_file):
    code, report = run(capsys, "normconst", param_file({"theta": [0, 0, 0], "gamma": [0, 0, 0]}),
                       "--n-points", "8", "--d", "0.1")
    assert code == 3
    assert "residual" in report["error"]


def test_grad(capsys, param_file):
    code, report = run(capsys, "grad", param_file({"theta": [0, 1, 2], "gamma": [0, 1, 0]}))
    out = report["outputs"]
    assert code == 0
    assert sum(out["dtheta"]) == pytest.approx(-out["value"], rel=1e-10)
    assert out["dgamma"][0] == 0.0


def test_sample_then_fit_round_trip(capsys, param_file, tmp_path):
    path = param_file({"theta": [1, 2, 3], "gamma": [1, 2, 3]})
    csv1, csv2 = tmp_path / "a.csv", tmp_path / "b.csv"
    code, report = run(capsys, "sample", path, "--n", 1000, "--seed", 0, "--out", csv1)
    assert code == 0 and 0 < report["outputs"]["acceptance_rate"] <= 1
    run(capsys, "sample", path, "--n", 1000, "--seed", 0, "--out", csv2)
    assert csv1.read_bytes() == csv2.read_bytes()
    lines = csv1.read_text().splitlines()
    assert len(lines) == 1000 and all(len(l.split(",")) == 3 for l in lines)

    code, report = run(capsys, "fit", csv1)
    out = report["outputs"]
    assert code == 0 and out["converged"]
    theta = np.array(out["theta_hat"])
    theta += np.mean(np.array([1, 2, 3]) - theta)
    assert np.max(np.abs(theta - [1, 2, 3])) < 0.3
    assert np.max(np.abs(np.array(out["gamma_hat"]) - [1, 2, 3])) < 0.2
    assert np.all(np.diff(out["objective_trace"]) <= 0)


def test_zero_parameter_sample(capsys, param_file, tmp_path):
    code, report = run(capsys, "sample", param_file({"theta": [0, 0, 0], "gamma": [0, 0, 0]}),
                       "--n", 100, "--out", tmp_path / "u.csv")
    assert report["outputs"]["acceptance_rate"] == 1.0


def test_sample_mean_covariance_rotates_back(capsys, param_file, tmp_path):
    sigma = np.array([[1.0, 0.6], [0.6, 1.0]])
    out = tmp_path / "r.csv"
    run(capsys, "sample", param_file({"mu": [2.0, 2.0], "sigma": sigma.tolist()}), "--n", 5000, "--out", out)
    X = read_data_csv(out)
    # density peaks along (1, 1) / sqrt(2)
    assert np.all(X.mean(axis=0) > 0.5)


def test_low_acceptance_exit_code(capsys, param_file, tmp_path):
    code, report = run(capsys, "sample", param_file({"theta": [0] * 6, "gamma": [10] * 6}), "--n", 100000,
                       "--max-tries", 70000, "--simple-envelope", "--out", tmp_path / "x.csv")
    assert code == 3
    assert "acceptance" in report["error"]
    assert not (tmp_path / "x.csv").exists()


def test_fit_rejects_off_sphere_rows(capsys, tmp_path):
    X = sample_fb(CanonicalParams([0, 1, 2], [1, 0, 0]), 50, seed=0).X
    X[[3, 17]] *= 1.5
    path = tmp_path / "bad.csv"
    path.write_text(format_csv(X))
    code, report = run(capsys, "fit", path)
    assert code == 2
    assert report["outputs"]["offending_rows"] == [3, 17]


def test_fit_renormalizes_nearly_unit_rows(capsys, tmp_path, caplog):
    X = sample_fb(CanonicalParams([0, 1, 2], [1, 0, 0]), 500, seed=0).X * (1 + 5e-4)
    path = tmp_path / "near.csv"
    path.write_text("x,y,z\n" + format_csv(X))
    code, report = run(capsys, "fit", path)
    assert code == 0
    assert "re-normalized" in caplog.text


def test_fit_non_convergence_exit_code(capsys, tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(format_csv(sample_fb(CanonicalParams([0, 1, 2], [1, 2, 0]), 300, seed=0).X))
    code, report = run(capsys, "fit", path, "--max-iter", 1)
    assert code == 4
    assert report["outputs"]["converged"] is False


def test_fit_with_init_file_and_frame(capsys, param_file, tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(format_csv(sample_fb(CanonicalParams([0, 1, 2], [1, 2, 0]), 500, seed=0).X))
    init = param_file({"theta": [0, 1, 2], "gamma": [1, 2, 0]}, "init.json")
    code, report = run(capsys, "fit", path, "--init-file", init, "--optimize-frame", "--optimizer", "quasi_newton")
    assert code == 0
    assert report["outputs"]["vhat_norm"] < 1e-6


def test_latent_csv_smoke(capsys, tmp_path):
    # stand-in for externally produced latent vectors: any n x p unit rows
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(400, 8)) + np.linspace(0, 2, 8)
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    path = tmp_path / "latents.csv"
    path.write_text(format_csv(Z))
    code, report = run(capsys, "fit", path)
    assert code == 0 and report["inputs"]["p"] == 8


def test_verify(capsys):
    code, report = run(capsys, "verify")
    out = report["outputs"]
    assert code == 0 and out["passed"]
    assert out["n_fixtures"] == 36
    names = {e["name"]: e for e in out["fixtures"]}
    assert names["table1/4d/kappa=100"]["value"] == pytest.approx(0.935094, abs=1e-6)
    assert names["table3/4d/kappa=30"]["value"] == pytest.approx(0.503213, abs=1e-6)
    assert names["table3/5d/kappa=200"]["value"] == pytest.approx(0.024316, abs=1e-6)


@pytest.mark.filterwarnings("ignore:saddle distance")
def test_verify_failure_is_nonzero(capsys):
    code, report = run(capsys, "verify", "--n-points", "30")
    assert code == 3 and not report["outputs"]["passed"]


def test_bench(capsys, tmp_path):
    out = tmp_path / "bench.csv"
    code, report = run(capsys, "bench", "--p-list", "10,20,30,40", "--repeats", 3, "--csv", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "p,median_ms"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [10, 20, 30, 40]
    assert report["outputs"]["r_squared"] is not None


def test_bench_time_scales_with_nodes():
    from fbnorm.bench import run_bench

    rows1, _, _ = run_bench(p_list=[100], n_points=200, repeats=15)
    rows2, _, _ = run_bench(p_list=[100], n_points=400, repeats=15)
    assert 1.0 < rows2[0][1] / rows1[0][1] < 3.0


def test_report_file_written(capsys, param_file, tmp_path):
    dest = tmp_path / "report.json"
    main(["--report", str(dest), "normconst", str(param_file({"theta": [0, 1], "gamma": [0, 0]}))])
    capsys.readouterr()
    jsonschema.validate(json.loads(dest.read_text()), report_schema())


def test_csv_is_locale_independent(monkeypatch):
    for name in ("de_DE.UTF-8", "fr_FR.UTF-8"):
        try:
            locale.setlocale(locale.LC_NUMERIC, name)
            break
        except locale.Error:
            continue
    try:
        text = format_csv(np.array([[0.5, -1.25e-7]]))
    finally:
        locale.setlocale(locale.LC_NUMERIC, "C")
    assert text == "0.5,-1.25e-07\n"


def test_project_to_sphere_thresholds():
    X = np.array([[1.0, 0.0], [0.0, 1.0 + 1e-7]])
    np.testing.assert_allclose(np.linalg.norm(project_to_sphere(X), axis=1), 1.0)
    with pytest.raises(DataValidationError):
        project_to_sphere(np.array([[2.0, 0.0]]))


def test_write_atomic_replaces(tmp_path):
    dest = tmp_path / "f.txt"
    write_atomic(dest, "one")
    write_atomic(dest, "two")
    assert dest.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["f.txt"]
