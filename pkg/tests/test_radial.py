from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from singrobin.errors import PoleAtLambda
from singrobin.models import BoundaryParams
from singrobin.radial import (
    FreeSolution,
    ModeIndex,
    RadialPotential,
    beta_bracket,
    choose_delta,
    determinant_identity,
    integrate_radial,
    l0_shooting_phase,
    lagrange_bracket_1d,
    m_function,
    outward_phase,
    sample_m_function,
    u0,
    v0,
)


def test_mode_index():
    zeroth = ModeIndex.for_mode(0, 0.5)
    assert zeroth.mu == -4.0
    assert zeroth.sigma == pytest.approx(0.5)
    assert ModeIndex.for_mode(3, 0.5).sigma == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        ModeIndex(2, 3.0)


def test_potential_validation():
    with pytest.raises(ValueError):
        RadialPotential(np.array([0.5, 0.4]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        RadialPotential(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    assert RadialPotential.constant(3.0).constant_value == 3.0
    assert RadialPotential.zero().shifted(0.5).constant_value == 0.5


def test_choose_delta(zero_q):
    assert choose_delta(0.0, zero_q) == 1e-3
    assert choose_delta(-1e6, zero_q) == pytest.approx(1e-8)
    assert choose_delta(-1e6, RadialPotential.constant(1e6)) == pytest.approx(math.sqrt(1e-10 / 2e6))


def test_free_solution_brackets():
    b = 0.7
    assert lagrange_bracket_1d(u0(b), v0(b), 0.3) == pytest.approx(-1.0 / b)
    assert lagrange_bracket_1d(u0(b), u0(b), 0.3) == pytest.approx(0.0, abs=1e-15)


def test_determinant_identity_on_free_solutions():
    b = 0.8
    first = FreeSolution(b, 1.3, -0.4)
    second = FreeSolution(b, 0.2, 2.0)
    lhs, rhs = determinant_identity(first, second, b, 0.05)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_l0_phase_decreases_in_lambda(unit_params, zero_q):
    t_min = math.log(choose_delta(1e4, zero_q))
    lams = [-1e4, -1e3, -10.0, -1.0, 0.0, 5.0, 50.0]
    phases = [l0_shooting_phase(unit_params, lam, zero_q, t_min) for lam in lams]
    assert all(a > b for a, b in zip(phases, phases[1:]))
    assert phases[4] == 0.0


def test_outward_phase_increases_in_lambda(zero_q):
    mode = ModeIndex.for_mode(2, 1.0)
    phases = [outward_phase(mode, lam, zero_q, t_min=math.log(1e-6)) for lam in (-100.0, -1.0, 10.0, 40.0)]
    assert all(a < b for a, b in zip(phases, phases[1:]))


def test_inward_solution_is_consistent(unit_params, zero_q):
    solution = integrate_radial(ModeIndex.for_mode(0, 1.0), -50.0, zero_q, "inward", params=unit_params)
    assert solution.t.size == 200
    value, r_derivative = solution.evaluate(1.0)
    assert abs(value) < 1e-12 * abs(r_derivative)
    assert solution.ode_residual() < 1e-6


def test_outward_frobenius_start(zero_q):
    solution = integrate_radial(ModeIndex.for_mode(2, 1.0), -3.0, zero_q, "outward")
    _, value, r_derivative = solution.state(0.5)
    # r^n-like solution: r psi'/psi close to n where lambda r^2 is small
    _, small_value, small_derivative = solution.state(2.0 * solution.delta)
    assert small_derivative / small_value == pytest.approx(2.0, rel=1e-5)
    assert value > 0 and r_derivative > 0


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("lam", [-5.0, 3.0])
def test_m_function_closed_form_matches_ode(n, lam, unit_params, zero_q):
    mode = ModeIndex.for_mode(n, 1.0)
    closed = m_function(mode, lam, zero_q, unit_params, method="closed_form")
    ode = m_function(mode, lam, zero_q, unit_params, method="ode")
    assert ode == pytest.approx(closed, rel=1e-7)


def test_m_function_at_zero_is_minus_n(unit_params, zero_q):
    assert m_function(ModeIndex.for_mode(4, 1.0), 0.0, zero_q, unit_params) == pytest.approx(-4.0)


def test_m_function_pole_at_bessel_zero(unit_params, zero_q):
    j11 = 3.8317059702075125
    with pytest.raises(PoleAtLambda) as info:
        m_function(ModeIndex.for_mode(1, 1.0), j11 * j11, zero_q, unit_params)
    assert info.value.mode == 1


@pytest.mark.parametrize("n", [0, 1, 3])
def test_m_function_is_herglotz(n, unit_params, zero_q):
    mode = ModeIndex.for_mode(n, 1.0)
    for lam in (complex(-20.0, 0.5), complex(-3.0, -2.0), complex(4.0, 1.0)):
        value = m_function(mode, lam, zero_q, unit_params)
        assert value.imag * lam.imag > 0


def test_sample_m_function_marks_poles(unit_params, zero_q):
    j11 = 3.8317059702075125
    samples = sample_m_function(ModeIndex.for_mode(1, 1.0), [-1.0, j11 * j11], zero_q, unit_params)
    assert math.isfinite(abs(samples[0].value))
    assert samples[1].value == complex(math.inf)


def test_beta_bracket_vanishes_for_free_reference():
    params = BoundaryParams(b=1.0, beta=0.5)
    reference = FreeSolution(1.0, 1.0, 0.5)
    assert abs(beta_bracket(reference, params, 1e-3)) < 1e-14
    assert abs(beta_bracket(u0(1.0), params, 1e-3, normalized=True)) == pytest.approx(
        0.5 / math.sqrt(1.25), rel=1e-12
    )


def test_determinant_identity_on_computed_solutions(unit_params, zero_q):
    mode = ModeIndex.for_mode(0, 1.0)
    inward = integrate_radial(mode, -20.0, zero_q, "inward", params=unit_params)
    outward = integrate_radial(mode, -20.0, zero_q, "outward", params=unit_params)
    brackets = []
    for r in (1e-3, 0.05, 0.5):
        lhs, rhs = determinant_identity(inward, outward, 1.0, r)
        assert lhs == pytest.approx(rhs, rel=1e-8)
        brackets.append(lhs)
    # the Lagrange bracket of two solutions does not depend on r
    assert brackets[0] == pytest.approx(brackets[2], rel=1e-6)
    assert brackets[1] == pytest.approx(brackets[2], rel=1e-6)


def test_m_function_increases_between_poles(unit_params, zero_q):
    zeroth = ModeIndex.for_mode(0, 1.0)
    values = [m_function(zeroth, lam, zero_q, unit_params) for lam in (-1000.0, -100.0, -20.0, -10.0)]
    assert all(a < b for a, b in zip(values, values[1:]))
    first = ModeIndex.for_mode(1, 1.0)
    values = [m_function(first, lam, zero_q, unit_params, method="ode") for lam in (-50.0, -5.0, 0.0, 5.0, 12.0)]
    assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n", [0, 2])
def test_m_function_shift_covariance(n, unit_params):
    q = RadialPotential(np.array([0.2, 0.6, 1.0]), np.array([0.5, 0.8, 0.3]))
    mode = ModeIndex.for_mode(n, 1.0)
    moved = m_function(mode, -7.0, q.shifted(2.0), unit_params)
    base = m_function(mode, -9.0, q, unit_params)
    assert moved == pytest.approx(base, rel=1e-8)


def test_outward_solution_is_a_multiple_of_j2(zero_q):
    solution = integrate_radial(ModeIndex.for_mode(2, 1.0), 10.0, zero_q, "outward")
    k = math.sqrt(10.0)
    ratios = [solution.evaluate(r)[0] / special.jv(2, k * r) for r in np.linspace(0.1, 1.0, 10)]
    assert np.allclose(ratios, ratios[0], rtol=1e-8, atol=0.0)
