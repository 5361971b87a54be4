"""Recover (b, beta) from a tail of negative eigenvalues.

b comes from the log-gaps of consecutive eigenvalues, which approach 2 pi b.
atan(beta) comes from the offset of log(-lam_n) once b and theta0 are known;
the estimate is reduced modulo pi, so the absolute index of a measured tail
does not matter.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .asymptotics import AsymptoticModel, asymptotic_log_magnitude, compute_theta0
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import EstimateOutOfBranch, InsufficientTail, NonMonotoneTail
from .models import BoundaryParams, EigenvalueRecord
from .radial import RadialPotential
from .spectrum import negative_tail, resolvent_shift_if_needed
from .utils import principal_angle

LOG = logging.getLogger("singrobin.recovery")

TailPoint = tuple[int | None, float]
MIN_TAIL = 4
AVERAGED_GAPS = 3


@dataclass(frozen=True)
class BEstimate:
    b_hat: float
    gap_estimates: list[float]
    raw_estimates: list[float]


@dataclass(frozen=True)
class BetaEstimate:
    beta_hat: float
    atan_estimates: list[float]
    spread: float


@dataclass(frozen=True)
class RecoveryResult:
    b_hat: float
    beta_hat: float
    theta0: float
    b_estimates: list[float]
    b_raw_estimates: list[float]
    atan_beta_estimates: list[float]
    diagnostics: dict[str, float] = field(default_factory=dict)

    def summary(self) -> str:
        lines = [
            f"b_hat      {self.b_hat:.12g}",
            f"beta_hat   {self.beta_hat:.12g}",
            f"theta0     {self.theta0:.12g}",
            f"tail size  {len(self.b_estimates) + 1}",
        ]
        lines += [f"{key:<10} {value:.6g}" for key, value in sorted(self.diagnostics.items())]
        return "\n".join(lines) + "\n"


def as_tail(records: Sequence[EigenvalueRecord]) -> list[TailPoint]:
    return [(r.index, r.lam) for r in records if r.lam < 0.0]


def _ordered_tail(eigs: Sequence[TailPoint]) -> list[TailPoint]:
    """Most negative first; rejects tails that do not increase strictly toward 0-."""
    if len(eigs) < MIN_TAIL:
        raise InsufficientTail(f"need at least {MIN_TAIL} negative eigenvalues, got {len(eigs)}")
    tail = sorted(eigs, key=lambda point: point[1])
    values = [lam for _, lam in tail]
    if any(lam >= 0.0 or not math.isfinite(lam) for lam in values):
        raise NonMonotoneTail("tail contains non-negative or non-finite eigenvalues")
    if any(a == b for a, b in zip(values, values[1:])):
        raise NonMonotoneTail("tail contains repeated eigenvalues")
    indices = [index for index, _ in tail]
    if all(index is not None for index in indices):
        if any(b - a != 1 for a, b in zip(indices, indices[1:])):
            raise NonMonotoneTail("tail indices must be consecutive and increase with lambda")
    elif any(index is not None for index in indices):
        LOG.info("partial tail indices are ignored")
    return tail


def _relative_indices(tail: list[TailPoint]) -> list[int]:
    indices = [index for index, _ in tail]
    if all(index is not None for index in indices):
        return indices  # type: ignore[return-value]
    return list(range(-len(tail), 0))


def recover_b(eigs: Sequence[TailPoint]) -> BEstimate:
    tail = _ordered_tail(eigs)
    logs = [math.log(-lam) for _, lam in tail]
    gaps = [(deeper - shallower) / (2.0 * math.pi) for deeper, shallower in zip(logs, logs[1:])]
    b_hat = sum(gaps[:AVERAGED_GAPS]) / min(AVERAGED_GAPS, len(gaps))
    raw = []
    if all(index is not None for index, _ in tail):
        raw = [-log / (2.0 * index * math.pi) for (index, _), log in zip(tail, logs)]
    if not b_hat > 0:
        raise NonMonotoneTail(f"gap estimate of b is not positive: {b_hat}")
    return BEstimate(b_hat, gaps, raw)


def _circular_mean(angles: Sequence[float]) -> tuple[float, float]:
    """Mean and largest deviation of angles defined modulo pi."""
    s = sum(math.sin(2.0 * a) for a in angles)
    c = sum(math.cos(2.0 * a) for a in angles)
    if s == 0.0 and c == 0.0:
        raise EstimateOutOfBranch("atan(beta) estimates cancel on the circle")
    mean = principal_angle(0.5 * math.atan2(s, c))
    spread = max(abs(principal_angle(a - mean)) for a in angles)
    return mean, spread


def recover_beta(
    eigs: Sequence[TailPoint],
    b_hat: float,
    theta0: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BetaEstimate:
    """atan(beta) ~ (log(-lam_n) + 2 b n pi)/(2 b) - theta0, reduced into (-pi/2, pi/2]."""
    tail = _ordered_tail(eigs)
    indices = _relative_indices(tail)
    estimates = [
        principal_angle((math.log(-lam) + 2.0 * b_hat * n * math.pi) / (2.0 * b_hat) - theta0)
        for n, (_, lam) in zip(indices, tail)
    ]
    deepest = estimates[: max(AVERAGED_GAPS, len(estimates) // 2)]
    mean, spread = _circular_mean(deepest)
    if spread > tol.branch_tol:
        raise EstimateOutOfBranch(
            f"atan(beta) estimates spread by {spread:.3f}; b_hat and theta0 look inconsistent"
        )
    if abs(abs(mean) - math.pi / 2) < 1e-12:
        raise EstimateOutOfBranch("atan(beta) sits on the branch edge; beta is infinite")
    return BetaEstimate(math.tan(mean), estimates, spread)


def recover(eigs: Sequence[TailPoint], tol: Tolerances = DEFAULT_TOLERANCES) -> RecoveryResult:
    b_part = recover_b(eigs)
    theta0 = compute_theta0(b_part.b_hat, tol).theta0
    beta_part = recover_beta(eigs, b_part.b_hat, theta0, tol)
    return RecoveryResult(
        b_hat=b_part.b_hat,
        beta_hat=beta_part.beta_hat,
        theta0=theta0,
        b_estimates=b_part.gap_estimates,
        b_raw_estimates=b_part.raw_estimates,
        atan_beta_estimates=beta_part.atan_estimates,
        diagnostics={"atan_spread": beta_part.spread},
    )


def recover_roundtrip(
    params_true: BoundaryParams,
    q: RadialPotential,
    n_tail: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RecoveryResult:
    """Forward tail, then recovery; the diagnostics carry both absolute errors."""
    if n_tail < MIN_TAIL:
        raise InsufficientTail(f"n_tail must be at least {MIN_TAIL}, got {n_tail}")
    shifted, shift = resolvent_shift_if_needed(params_true, q, tol)
    records = negative_tail(params_true, shifted, n_tail, tol)
    # undo the resolvent shift before anything leaves this function
    tail = [(r.index, r.lam - shift) for r in records if r.lam - shift < 0.0]
    result = recover(tail, tol)
    result.diagnostics.update(
        {
            "b_error": abs(result.b_hat - params_true.b),
            "beta_error": abs(result.beta_hat - params_true.beta),
            "shift": shift,
        }
    )
    LOG.info(
        "round trip b=%g beta=%g: b_hat=%.10g beta_hat=%.10g",
        params_true.b, params_true.beta, result.b_hat, result.beta_hat,
    )
    return result


def model_tail(
    params: BoundaryParams,
    theta0: float,
    count: int,
    index_shift: int = 1,
) -> list[TailPoint]:
    """Exact asymptotic-model eigenvalues for n = -1 .. -count."""
    model = AsymptoticModel(params.b, params.beta, theta0, index_shift)
    points = []
    for n in range(-count, 0):
        log_magnitude = asymptotic_log_magnitude(model, n)
        if log_magnitude > 709.0:
            raise OverflowError(f"model eigenvalue at n={n} leaves double range")
        points.append((n, -math.exp(log_magnitude)))
    return points
