from __future__ import annotations

import pytest

from singrobin.asymptotics import compute_theta0
from singrobin.errors import EstimateOutOfBranch, InsufficientTail, NonMonotoneTail
from singrobin.models import BoundaryParams, EigenvalueRecord
from singrobin.radial import RadialPotential
from singrobin.recovery import (
    as_tail,
    model_tail,
    recover,
    recover_b,
    recover_beta,
    recover_roundtrip,
)


@pytest.fixture(scope="module")
def exact_tail():
    params = BoundaryParams(b=1.0, beta=0.7)
    return params, model_tail(params, compute_theta0(1.0).theta0, 8)


def test_exact_model_is_recovered(exact_tail):
    params, tail = exact_tail
    result = recover(tail)
    assert result.b_hat == pytest.approx(params.b, abs=1e-12)
    assert result.beta_hat == pytest.approx(params.beta, abs=1e-10)
    assert result.diagnostics["atan_spread"] < 1e-10
    assert "b_hat" in result.summary()


def test_raw_quotients_approach_b(exact_tail):
    params, tail = exact_tail
    estimate = recover_b(tail)
    errors = [abs(raw - params.b) for raw in estimate.raw_estimates]
    assert len(errors) == len(tail)
    assert errors == sorted(errors)
    assert all(gap == pytest.approx(params.b, abs=1e-12) for gap in estimate.gap_estimates)


def test_shallowest_eigenvalue_does_not_matter(exact_tail):
    _, tail = exact_tail
    full = recover(tail)
    trimmed = recover(tail[:-1])
    assert trimmed.b_hat == pytest.approx(full.b_hat, abs=1e-12)
    assert trimmed.beta_hat == pytest.approx(full.beta_hat, abs=1e-10)


def test_indices_are_optional(exact_tail):
    params, tail = exact_tail
    bare = [(None, lam) for _, lam in tail]
    assert recover(bare).beta_hat == pytest.approx(params.beta, abs=1e-10)
    assert recover_b(bare).raw_estimates == []


def test_tail_validation(exact_tail):
    _, tail = exact_tail
    with pytest.raises(InsufficientTail):
        recover(tail[:3])
    with pytest.raises(NonMonotoneTail):
        recover_b(tail[:4] + [(0, 1.0)])
    with pytest.raises(NonMonotoneTail):
        recover_b([(-4, -100.0), (-3, -100.0), (-2, -10.0), (-1, -1.0)])
    with pytest.raises(NonMonotoneTail):
        recover_b([(-6, -1e4), (-4, -1e3), (-3, -1e2), (-2, -10.0)])


def test_inconsistent_b_leaves_the_branch(exact_tail):
    _, tail = exact_tail
    with pytest.raises(EstimateOutOfBranch):
        recover_beta(tail, 1.3, compute_theta0(1.3).theta0)


def test_model_tail_overflow():
    with pytest.raises(OverflowError):
        model_tail(BoundaryParams(b=1.0), 0.39, 200)


@pytest.mark.parametrize("b,beta", [(1.0, 0.0), (1.0, 1.0), (0.5, 0.0), (2.0, -1.0)])
def test_roundtrip_from_computed_spectrum(b, beta):
    result = recover_roundtrip(BoundaryParams(b=b, beta=beta), RadialPotential.zero(), 8)
    assert result.diagnostics["b_error"] < 1e-3 * b
    assert result.diagnostics["beta_error"] < 1e-2


def test_roundtrip_with_steep_point_condition():
    result = recover_roundtrip(BoundaryParams(b=0.5, beta=2.0), RadialPotential.zero(), 8)
    assert result.diagnostics["b_error"] < 1e-6
    assert result.diagnostics["beta_error"] < 1e-5


def test_roundtrip_undoes_the_resolvent_shift():
    result = recover_roundtrip(BoundaryParams(b=1.0), RadialPotential.zero(), 8)
    assert result.diagnostics["shift"] != 0.0
    assert result.b_hat == pytest.approx(1.0, abs=1e-6)


def test_roundtrip_with_constant_potential():
    result = recover_roundtrip(BoundaryParams(b=1.0), RadialPotential.constant(3.0), 8)
    assert result.diagnostics["b_error"] < 1e-3
    assert result.diagnostics["beta_error"] < 1e-2


def test_as_tail_keeps_negative_records():
    records = [
        EigenvalueRecord(0, -1, -2.2, 0.0, 0.0, 1),
        EigenvalueRecord(0, 0, 0.0, 0.0, 0.0, 0),
    ]
    assert as_tail(records) == [(-1, -2.2)]
