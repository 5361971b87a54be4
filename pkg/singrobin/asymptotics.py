"""Negative-eigenvalue asymptotics: the phase constant theta0, the exponential
model for the L0' tail, model comparison and pseudo-mode residuals.
"""
from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import logsumexp

from .angular import angular_eigenpair, gauss_grid
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ConvergenceError, InsufficientTail
from .models import BoundaryParams, EigenvalueRecord
from .radial import ModeIndex, RadialPotential, RadialSolution, integrate_radial
from .specfun import evaluate_imag_order, gamma_phase
from .spectrum import eigenvalue_by_index
from .utils import principal_angle, safe_exp

LOG = logging.getLogger("singrobin.asymptotics")

THETA0_START = 1e-4
BESSEL_PHASE_POINT = 1e-6


@dataclass(frozen=True)
class Theta0Result:
    theta0: float
    A: float
    B: float
    t_max: float
    diagnostics: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class AsymptoticModel:
    """lam_n ~ -exp(2b(theta0 + atan beta) - 2 b pi (n + index_shift)) for n -> -inf."""

    b: float
    beta: float
    theta0: float
    index_shift: int = 1

    @property
    def offset(self) -> float:
        return 2.0 * self.b * (self.theta0 + math.atan(self.beta))


# --- theta0 ----------------------------------------------------------------------


def _half_line_start(b: float, t0: float) -> tuple[complex, complex]:
    """w = sqrt(t) t^{i/b}(1 + t^2/(4(1 + i/b))) and t w'(t) at t0."""
    nu = 1.0 / b
    lead = t0 ** (0.5 + 1j * nu)
    c = 1.0 / (4.0 * (1.0 + 1j * nu))
    value = lead * (1.0 + c * t0 * t0)
    t_derivative = lead * ((0.5 + 1j * nu) + c * (2.5 + 1j * nu) * t0 * t0)
    return value, t_derivative


def theta0_horizons(b: float) -> tuple[float, float]:
    t1 = max(30.0, 10.0 + 5.0 * math.log(1.0 / b))
    return t1, t1 + 5.0


def compute_theta0(b: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Theta0Result:
    """theta0 = atan(A/B) from the half-line problem -w'' - (1/4 + 1/b^2) t^-2 w = -w.

    w_s and w_c are the imaginary and real parts of one complex solution started
    at t0 = 1e-4 on the bracket data sqrt(t) sin(log t / b), sqrt(t) cos(log t / b);
    A and B are the limits of e^-t w_s, e^-t w_c.
    """
    if not 0.1 <= b <= 10.0:
        raise ValueError(f"compute_theta0 supports b in [0.1, 10], got {b}")
    k = 0.25 + 1.0 / (b * b)
    t1, t2 = theta0_horizons(b)

    # log-time form: s = log t, D = t w'
    def rhs(s: float, y: np.ndarray) -> np.ndarray:
        t = math.exp(s)
        return np.array([y[1], y[1] + (t * t - k) * y[0]])

    w0, d0 = _half_line_start(b, THETA0_START)
    s0 = math.log(THETA0_START)
    sol = solve_ivp(
        rhs,
        (s0, math.log(t2)),
        np.array([w0, d0], dtype=complex),
        method="DOP853",
        rtol=1e-13,
        atol=1e-16 * abs(w0),
        dense_output=True,
    )
    if not sol.success:
        raise ConvergenceError(f"half-line integration failed: {sol.message}")

    def limits(t: float) -> complex:
        return complex(sol.sol(math.log(t))[0]) * math.exp(-t)

    z1, z2 = limits(t1), limits(t2)
    theta1 = principal_angle(math.atan2(z1.imag, z1.real))
    theta2 = principal_angle(math.atan2(z2.imag, z2.real))
    drift = abs(principal_angle(theta2 - theta1))
    if drift > tol.theta0_richardson:
        raise ConvergenceError(f"theta0 moved by {drift:.2e} between t={t1:g} and t={t2:g}")

    # e^-t w(t) = C (1 + c1/t + ...): extrapolate the 1/t term away
    z = (t2 * z2 - t1 * z1) / (t2 - t1)
    A, B = z.imag, z.real
    if A == 0.0 and B == 0.0:
        raise ConvergenceError("both half-line limits vanished")
    theta0 = principal_angle(math.atan2(A, B))

    diagnostics = {"phase_drift": drift}
    for t in (10.0 * THETA0_START, 100.0 * THETA0_START):
        w, d = sol.sol(math.log(t))
        phase = math.log(t) / b
        # [w_s, sqrt(t) sin(log t / b)] in the t-scaled bracket
        ref = math.sqrt(t) * math.sin(phase)
        ref_d = math.sqrt(t) * (0.5 * math.sin(phase) + math.cos(phase) / b)
        diagnostics[f"bracket_t{t:g}"] = abs(complex(w).imag * ref_d - complex(d).imag * ref)
    LOG.debug("theta0(b=%g) = %.12f, A=%.6e, B=%.6e", b, theta0, A, B)
    return Theta0Result(theta0, A, B, t1, diagnostics)


def theta0_bessel_phase(b: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """theta0 from the small-argument phase of I_{i/b}: the half-line solution is sqrt(t) I_{i/b}(t)."""
    t = BESSEL_PHASE_POINT
    value = evaluate_imag_order("I", b, t, method="series", tol=tol).value
    phase = math.atan2(value.imag, value.real) - math.log(t) / b
    return principal_angle(-phase)


def theta0_closed_form(b: float) -> float:
    return principal_angle(math.log(2.0) / b + gamma_phase(b))


# --- model ---------------------------------------------------------------------


def asymptotic_log_magnitude(model: AsymptoticModel, n: int) -> float:
    """log(-lam_n) of the model."""
    if n > -1:
        raise ValueError("the asymptotic model addresses n <= -1")
    return model.offset - 2.0 * math.pi * model.b * (n + model.index_shift)


def asymptotic_lambda(model: AsymptoticModel, n: int) -> float:
    """Model eigenvalue; -inf once |lam| leaves double range (use asymptotic_log_magnitude)."""
    return -safe_exp(asymptotic_log_magnitude(model, n))


def _negatives(records: Sequence[EigenvalueRecord]) -> list[EigenvalueRecord]:
    return sorted((r for r in records if r.lam < 0.0), key=lambda r: r.index)


def register_index(
    model: AsymptoticModel,
    records: Sequence[EigenvalueRecord],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AsymptoticModel:
    """Fit the integer index shift of the model against computed negative eigenvalues."""
    negatives = _negatives(records)
    if not negatives:
        raise InsufficientTail("no negative eigenvalues to register against")
    deepest = negatives[: max(3, len(negatives) // 2)]
    shifts = [
        (model.offset - math.log(-r.lam)) / (2.0 * math.pi * model.b) - r.index for r in deepest
    ]
    centre = statistics.median(shifts)
    shift = round(centre)
    if abs(centre - shift) > tol.branch_tol:
        LOG.warning("index registration is ambiguous: fitted shift %.3f", centre)
    return replace(model, index_shift=shift)


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    lam: float
    lam_asym: float
    ratio: float
    log_residual: float
    pseudo_mode_residual: float | None = None


@dataclass(frozen=True)
class ComparisonReport:
    model: AsymptoticModel
    rows: list[ComparisonRow]

    header = ("n", "lambda", "lambda_asym", "ratio", "log_residual", "pseudo_mode_residual")

    def as_rows(self) -> list[tuple]:
        return [
            (r.n, r.lam, r.lam_asym, r.ratio, r.log_residual, r.pseudo_mode_residual) for r in self.rows
        ]


def compare_spectrum_to_model(
    records: Sequence[EigenvalueRecord],
    model: AsymptoticModel,
    pseudo: dict[int, float] | None = None,
) -> ComparisonReport:
    negatives = _negatives(records)
    if len(negatives) < 3:
        raise InsufficientTail(f"need at least 3 negative eigenvalues, got {len(negatives)}")
    rows = []
    for record in negatives:
        predicted = asymptotic_log_magnitude(model, record.index)
        residual = math.log(-record.lam) - predicted
        rows.append(
            ComparisonRow(
                n=record.index,
                lam=record.lam,
                lam_asym=-safe_exp(predicted),
                ratio=math.exp(residual),
                log_residual=residual,
                pseudo_mode_residual=None if pseudo is None else pseudo.get(record.index),
            )
        )
    return ComparisonReport(model, rows)


# --- pseudo-modes -------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffSpec:
    """mu(r) = 1 on r <= plateau, 0 on r >= support, quintic C2 blend between."""

    plateau: float = 0.5
    support: float = 0.95

    def __post_init__(self) -> None:
        if not 0.0 < self.plateau < self.support < 1.0:
            raise ValueError("cutoff needs 0 < plateau < support < 1")

    def derivatives(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        width = self.support - self.plateau
        x = np.clip((r - self.plateau) / width, 0.0, 1.0)
        mu = 1.0 - (10 * x**3 - 15 * x**4 + 6 * x**5)
        mu1 = -(30 * x**2 - 60 * x**3 + 30 * x**4) / width
        mu2 = -(60 * x - 180 * x**2 + 120 * x**3) / width**2
        return mu, mu1, mu2


@dataclass(frozen=True)
class PseudoModeResult:
    n: int
    lam: float
    log_residual: float

    @property
    def residual(self) -> float:
        return safe_exp(self.log_residual)


def _log_abs(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def pseudo_mode_residual(
    n: int,
    params: BoundaryParams,
    cutoff: CutoffSpec = CutoffSpec(),
    q: RadialPotential | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    solution: RadialSolution | None = None,
) -> PseudoModeResult:
    """||(T - lam_n)(mu phi_n)|| / ||mu phi_n|| for the n-th L0' eigenfunction phi_n.

    The residual -(Lap mu) phi_n - 2 grad mu . grad phi_n lives on the
    half-annulus plateau < r < support; both norms are accumulated in log space.
    """
    q = RadialPotential.zero() if q is None else q
    if solution is None:
        lam = eigenvalue_by_index(params, q, n, tol).lam
        solution = integrate_radial(ModeIndex.for_mode(0, params.b), lam, q, "inward", tol=tol)
    lam = float(np.real(solution.lam))
    angular = angular_eigenpair(0, params.b)

    theta, theta_weights = gauss_grid(64)
    log_angular = math.log(float(np.sum(theta_weights * angular(theta) ** 2)))

    nodes, weights = np.polynomial.legendre.leggauss(200)
    half = 0.5 * (cutoff.support - cutoff.plateau)
    r = cutoff.plateau + half * (nodes + 1.0)
    weights = half * weights
    states = [solution.state(float(x)) for x in r]
    log_amp = np.array([s[0] for s in states])
    value = np.array([float(np.real(s[1])) for s in states])
    r_derivative = np.array([float(np.real(s[2])) for s in states])
    _, mu1, mu2 = cutoff.derivatives(r)
    # (mu'' + mu'/r) R + 2 mu' R' with R' = (r R')/r
    density = (mu2 + mu1 / r) * value + 2.0 * mu1 * r_derivative / r
    log_num = logsumexp(2.0 * log_amp + 2.0 * _log_abs(density) + np.log(r * weights))

    t = np.linspace(math.log(solution.delta), 0.0, 8001)
    grid_states = [solution.state(math.exp(x)) for x in t]
    grid_amp = np.array([s[0] for s in grid_states])
    grid_value = np.array([float(np.real(s[1])) for s in grid_states])
    mu, _, _ = cutoff.derivatives(np.exp(t))
    trapezoid = np.full(t.size, t[1] - t[0])
    trapezoid[[0, -1]] *= 0.5
    # int mu^2 R^2 r dr = int mu^2 psi^2 e^{2t} dt
    log_den = logsumexp(2.0 * grid_amp + 2.0 * _log_abs(mu * grid_value) + 2.0 * t + np.log(trapezoid))

    # Theta_0 is normalized, so the denominator carries no angular factor
    log_residual = 0.5 * (log_num + log_angular - log_den)
    LOG.debug("pseudo-mode n=%d lam=%.6e log residual %.4f", n, lam, log_residual)
    return PseudoModeResult(n, lam, float(log_residual))
