from __future__ import annotations

import yaml

from singrobin.asymptotics import compute_theta0
from singrobin.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from singrobin.models import BoundaryParams
from singrobin.recovery import model_tail
from singrobin.store import RunStore


def _spectrum_args(out) -> list[str]:
    return [
        "spectrum", "--b", "1", "--beta", "0", "--q", "zero",
        "--lambda-min", "-1200", "--lambda-max", "20", "--output-dir", str(out),
    ]


def test_spectrum_run_is_deterministic(tmp_path):
    assert main(_spectrum_args(tmp_path / "a")) == EXIT_OK
    assert main(_spectrum_args(tmp_path / "b")) == EXIT_OK
    first = (tmp_path / "a" / "spectrum.csv").read_bytes()
    assert first == (tmp_path / "b" / "spectrum.csv").read_bytes()
    lines = first.decode().splitlines()
    assert lines[0] == "index,mode_n,lambda,bracket_residual"
    assert "0,0,0,0" in lines
    assert [line.split(",")[0] for line in lines[1:3]] == ["-2", "-1"]
    manifest = yaml.safe_load((tmp_path / "a" / "manifest.yaml").read_text())
    assert manifest["command"] == "spectrum"
    assert manifest["results"]["negative"] == 2


def test_missing_b_is_a_config_error(tmp_path):
    assert main(["spectrum", "--output-dir", str(tmp_path)]) == EXIT_CONFIG


def test_non_positive_b_is_a_config_error(tmp_path):
    assert main(["spectrum", "--b", "0", "--output-dir", str(tmp_path)]) == EXIT_CONFIG
    assert main(["spectrum", "--b", "-1", "--output-dir", str(tmp_path)]) == EXIT_CONFIG


def test_bad_potential_table_is_a_config_error(tmp_path, write_file):
    table = write_file("q.csv", "r,q\n0.2,1.0\n0.1,2.0\n")
    args = ["spectrum", "--b", "1", "--q", str(table), "--output-dir", str(tmp_path / "out")]
    assert main(args) == EXIT_CONFIG


def test_short_tail_is_a_numerical_error(tmp_path, write_file):
    tail = write_file("tail.csv", "index,lambda\n-2,-1176.0\n-1,-2.2\n")
    assert main(["recover", "--tail", str(tail), "--output-dir", str(tmp_path / "out")]) == EXIT_NUMERICAL


def test_recover_from_model_tail(tmp_path, capsys):
    params = BoundaryParams(b=0.5, beta=-0.3)
    points = model_tail(params, compute_theta0(0.5).theta0, 8)
    RunStore(tmp_path).write_csv("tail.csv", ("index", "lambda"), points)
    out = tmp_path / "out"
    code = main(["recover", "--tail", str(tmp_path / "tail.csv"), "--output-dir", str(out)])
    assert code == EXIT_OK
    assert "b_hat" in capsys.readouterr().out
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert abs(manifest["results"]["b_hat"] - 0.5) < 1e-12
    assert abs(manifest["results"]["beta_hat"] + 0.3) < 1e-10
    assert (out / "recovery.txt").read_text().startswith("b_hat")
    assert (out / "recovery.csv").read_text().splitlines()[0] == "gap,b_gap_estimate,atan_beta_estimate"


def test_asymptotics_with_pseudo_modes(tmp_path):
    out = tmp_path / "out"
    args = [
        "asymptotics", "--b", "1", "--n-tail", "4", "--pseudo-modes",
        "--tol", "shoot_tol=1e-7", "--output-dir", str(out),
    ]
    assert main(args) == EXIT_OK
    lines = (out / "asymptotics.csv").read_text().splitlines()
    assert lines[0] == "n,lambda,lambda_asym,ratio,log_residual,pseudo_mode_log_residual"
    assert len(lines) == 5
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["results"]["index_shift"] == 1
    assert manifest["config"]["tolerances"]["shoot_tol"] == 1e-7


def test_pencil_run_writes_roots(tmp_path):
    out = tmp_path / "out"
    args = [
        "pencil", "--b", "0.5", "--lambda-min", "-3000", "--lambda-max", "-5",
        "--truncation", "8", "--sweep-points", "4", "--output-dir", str(out),
    ]
    assert main(args) == EXIT_OK
    roots = (out / "pencil_roots.csv").read_text().splitlines()
    assert roots[0] == "lambda,kernel_residual,pole_below,pole_above"
    assert len(roots) == 2
    sweep = (out / "pencil_sweep.csv").read_text().splitlines()
    assert sweep[0] == "lambda,E_value,min_eig_MplusC,N_used"
    assert len(sweep) == 5


def test_recover_reads_a_spectrum_file(tmp_path):
    forward = tmp_path / "forward"
    args = [
        "spectrum", "--b", "0.5", "--beta", "0", "--q", "zero",
        "--lambda-min", "-1500000", "--lambda-max", "-0.5", "--output-dir", str(forward),
    ]
    assert main(args) == EXIT_OK
    out = tmp_path / "recovered"
    code = main(["recover", "--tail", str(forward / "spectrum.csv"), "--output-dir", str(out)])
    assert code == EXIT_OK
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert abs(manifest["results"]["b_hat"] - 0.5) < 1e-3 * 0.5
    assert abs(manifest["results"]["beta_hat"]) < 1e-2
