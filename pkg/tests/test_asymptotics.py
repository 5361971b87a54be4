from __future__ import annotations

import math

import numpy as np
import pytest

from singrobin.asymptotics import (
    AsymptoticModel,
    CutoffSpec,
    asymptotic_lambda,
    asymptotic_log_magnitude,
    compare_spectrum_to_model,
    compute_theta0,
    pseudo_mode_residual,
    register_index,
    theta0_bessel_phase,
    theta0_closed_form,
)
from singrobin.errors import InsufficientTail
from singrobin.models import BoundaryParams
from singrobin.radial import RadialPotential
from singrobin.spectrum import negative_tail
from singrobin.utils import principal_angle

UNIT = BoundaryParams(b=1.0, beta=0.0)


@pytest.fixture(scope="module")
def unit_tail():
    return negative_tail(UNIT, RadialPotential.zero(), 5)


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_theta0_routes_agree(b):
    result = compute_theta0(b)
    for other in (theta0_bessel_phase(b), theta0_closed_form(b)):
        assert abs(principal_angle(result.theta0 - other)) < 1e-5
    assert result.diagnostics["phase_drift"] < 1e-6
    assert result.diagnostics["bracket_t0.001"] < 1e-7
    assert result.diagnostics["bracket_t0.01"] < 1e-4
    assert abs(principal_angle(math.atan2(result.A, result.B) - result.theta0)) < 1e-12


def test_theta0_reference_value():
    assert theta0_closed_form(1.0) == pytest.approx(math.log(2.0) - 0.30164032046753627, abs=1e-12)
    assert compute_theta0(1.0).theta0 == pytest.approx(0.3915, abs=1e-4)


def test_theta0_range_checked():
    with pytest.raises(ValueError):
        compute_theta0(20.0)


def test_model_algebra():
    model = AsymptoticModel(b=1.0, beta=1.0, theta0=0.4)
    assert model.offset == pytest.approx(2.0 * (0.4 + math.pi / 4))
    assert asymptotic_log_magnitude(model, -1) == pytest.approx(model.offset)
    assert asymptotic_log_magnitude(model, -3) == pytest.approx(model.offset + 4.0 * math.pi)
    assert asymptotic_lambda(model, -1) == pytest.approx(-math.exp(model.offset))
    assert asymptotic_lambda(model, -200) == -math.inf
    with pytest.raises(ValueError):
        asymptotic_log_magnitude(model, 0)


def test_register_index_finds_unit_shift(unit_tail):
    model = AsymptoticModel(b=1.0, beta=0.0, theta0=theta0_closed_form(1.0), index_shift=0)
    registered = register_index(model, unit_tail)
    assert registered.index_shift == 1


def test_comparison_against_computed_tail(unit_tail):
    model = AsymptoticModel(b=1.0, beta=0.0, theta0=theta0_closed_form(1.0))
    report = compare_spectrum_to_model(unit_tail, model)
    assert [row.n for row in report.rows] == [-5, -4, -3, -2, -1]
    for row in report.rows:
        assert abs(row.log_residual) < 0.05
        assert row.ratio == pytest.approx(1.0, abs=0.05)
        assert row.pseudo_mode_residual is None
    assert report.as_rows()[0][0] == -5
    assert len(report.header) == len(report.as_rows()[0])


def test_comparison_needs_three_negatives(unit_tail):
    model = AsymptoticModel(b=1.0, beta=0.0, theta0=0.39)
    with pytest.raises(InsufficientTail):
        compare_spectrum_to_model(unit_tail[:2], model)


def test_cutoff_profile():
    cutoff = CutoffSpec()
    mu, mu1, mu2 = cutoff.derivatives(np.array([0.3, 0.5, 0.95, 0.99]))
    assert np.allclose(mu, [1.0, 1.0, 0.0, 0.0], atol=1e-12)
    assert np.allclose(mu1, 0.0, atol=1e-10)
    assert np.allclose(mu2, 0.0, atol=1e-8)
    with pytest.raises(ValueError):
        CutoffSpec(plateau=0.9, support=0.5)


def test_pseudo_mode_residual_decays_down_the_tail():
    results = [pseudo_mode_residual(n, UNIT) for n in (-2, -3, -4, -5)]
    logs = [r.log_residual for r in results]
    assert all(a > b for a, b in zip(logs, logs[1:]))
    assert results[2].residual < 1e-2
    assert results[0].lam == pytest.approx(-1176.0, rel=0.01)


def test_wider_plateau_gives_smaller_residual():
    near = pseudo_mode_residual(-2, UNIT, CutoffSpec(plateau=0.5))
    far = pseudo_mode_residual(-2, UNIT, CutoffSpec(plateau=0.7))
    assert far.log_residual < near.log_residual


@pytest.mark.parametrize("b,beta", [(1.0, 0.0), (1.0, 1.0), (0.5, 0.0), (2.0, -1.0)])
def test_eight_deepest_eigenvalues_follow_the_law(b, beta):
    tail = negative_tail(BoundaryParams(b=b, beta=beta), RadialPotential.zero(), 8)
    model = register_index(AsymptoticModel(b=b, beta=beta, theta0=compute_theta0(b).theta0), tail)
    report = compare_spectrum_to_model(tail, model)
    assert [row.n for row in report.rows] == list(range(-8, 0))
    for row in report.rows[:4]:
        assert abs(row.ratio - 1.0) <= 0.05
    logs = [math.log(-r.lam) for r in tail]
    assert logs[0] - logs[1] == pytest.approx(2.0 * math.pi * b, abs=0.01)
