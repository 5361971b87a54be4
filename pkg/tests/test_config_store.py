from __future__ import annotations

import pytest
import yaml

from singrobin.config import DEFAULT_TOLERANCES, SettingsError, build_run_config, load_settings
from singrobin.errors import PotentialFormatError
from singrobin.radial import RadialPotential
from singrobin.store import RunStore, read_potential_table, read_tail


def test_default_tolerances():
    tol = DEFAULT_TOLERANCES
    assert tol.ode_rtol == 1e-11
    assert tol.shoot_tol == 1e-8
    assert tol.delta_max == 1e-3
    assert tol.x_switch == 8
    assert tol.checkpoints == 200


def test_missing_b_names_the_flag():
    with pytest.raises(SettingsError, match="--b"):
        build_run_config({}, {})


def test_invalid_b_rejected():
    with pytest.raises(SettingsError, match="b"):
        build_run_config({}, {"b": -1.0})


def test_window_must_be_ordered():
    with pytest.raises(SettingsError):
        build_run_config({}, {"b": 1.0, "lambda_min": 5.0, "lambda_max": 1.0})


def test_flags_override_yaml(write_file):
    path = write_file("run.yaml", "b: 2.0\nbeta: 0.5\ntolerances:\n  shoot_tol: 1.0e-7\n")
    config = load_settings(str(path), {"beta": -1.0, "tolerances": {"root_rtol": 1e-9}})
    assert config.b == 2.0
    assert config.beta == -1.0
    assert config.tolerances.shoot_tol == 1e-7
    assert config.tolerances.root_rtol == 1e-9


def test_key_value_file_with_dotted_tolerances(write_file):
    path = write_file("run.env", "b=0.5\nq=3\ntolerances.pole_tol=1e-9\nlambda-min=-100\n")
    config = load_settings(str(path))
    assert config.b == 0.5
    assert config.q == "3"
    assert config.lambda_min == -100.0
    assert config.tolerances.pole_tol == 1e-9


def test_unknown_key_rejected(write_file):
    path = write_file("run.yaml", "b: 1.0\nbogus: 3\n")
    with pytest.raises(SettingsError, match="bogus"):
        load_settings(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(SettingsError, match="not found"):
        load_settings(str(tmp_path / "absent.yaml"))


def test_csv_and_manifest_are_deterministic(tmp_path):
    rows = [(-1, 0, -2.2000000000000002, 1e-12), (0, 0, 0.0, 0.0)]
    first = RunStore(tmp_path / "a")
    second = RunStore(tmp_path / "b")
    for store in (first, second):
        store.write_csv("spectrum.csv", ("index", "mode_n", "lambda", "bracket_residual"), rows)
        store.write_manifest("spectrum", {"b": 1.0}, {"eigenvalues": 2})
    assert (tmp_path / "a" / "spectrum.csv").read_bytes() == (tmp_path / "b" / "spectrum.csv").read_bytes()
    text = (tmp_path / "a" / "spectrum.csv").read_text().splitlines()
    assert text[0] == "index,mode_n,lambda,bracket_residual"
    assert text[1] == "-1,0,-2.2000000000000002,9.9999999999999998e-13"
    manifest = yaml.safe_load((tmp_path / "a" / "manifest.yaml").read_text())
    assert manifest["command"] == "spectrum"
    assert manifest["config"] == {"b": 1.0}


def test_potential_table_roundtrip(write_file):
    path = write_file("q.csv", "r,q\n0.1,1.0\n0.5,2.0\n1.0,0.5\n")
    r, q = read_potential_table(path)
    assert r == [0.1, 0.5, 1.0]
    potential = RadialPotential.from_csv(path)
    assert potential(0.3) == pytest.approx(1.5)
    assert potential.sup_norm == 2.0
    assert potential.infimum == 0.5


def test_potential_table_non_increasing_reports_row(write_file):
    path = write_file("q.csv", "r,q\n0.1,1.0\n0.5,2.0\n0.4,0.5\n")
    with pytest.raises(PotentialFormatError) as info:
        read_potential_table(path)
    assert info.value.row == 4
    assert "row 4" in str(info.value)


def test_potential_table_rejects_r_outside_unit_interval(write_file):
    path = write_file("q.csv", "0.5,1.0\n1.5,2.0\n")
    with pytest.raises(PotentialFormatError) as info:
        read_potential_table(path)
    assert info.value.row == 2


def test_tail_reader_accepts_optional_index(write_file):
    indexed = write_file("tail.csv", "index,lambda\n-2,-1176.0\n-1,-2.2\n")
    bare = write_file("bare.csv", "lambda\n-1176.0\n-2.2\n")
    assert read_tail(indexed) == [(-2, -1176.0), (-1, -2.2)]
    assert read_tail(bare) == [(None, -1176.0), (None, -2.2)]


def test_read_tail_from_spectrum_file(write_file):
    spectrum = write_file(
        "spectrum.csv",
        "index,mode_n,lambda,bracket_residual\n"
        "-2,0,-1171.5,0\n-1,0,-2.2,0\n0,0,0,0\n1,1,14.68,0\n2,0,30.5,0\n",
    )
    assert read_tail(spectrum) == [(-2, -1171.5), (-1, -2.2)]
