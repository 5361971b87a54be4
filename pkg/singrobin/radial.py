"""Radial channels of the separated problem.

With t = log r the channel equation reads psi_tt = (mu + e^{2t}(q - lam)) psi.
Real lam is integrated in Pruefer form, psi = rho sin(theta),
sigma psi_t = rho cos(theta), with sigma = b for n = 0 and 1/n for n >= 1.
For n = 0 the phase is stored as the shift eta = theta - t/b against the free
oscillation sin(t/b), which freezes as t -> -inf.  Complex lam is integrated
as a linear system renormalized segment by segment.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Protocol, Sequence

import mpmath
import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import IntegrationError, PoleAtLambda
from .models import BoundaryParams, MFunctionSample
from .store import read_potential_table
from .utils import arccot

LOG = logging.getLogger("singrobin.radial")

Direction = Literal["inward", "outward"]


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """Piecewise-linear q(r) on (0, 1]; clamps to the end samples outside the table."""

    r: np.ndarray
    q: np.ndarray
    label: str = "table"

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float).ravel()
        q = np.asarray(self.q, dtype=float).ravel()
        if r.size == 0 or r.size != q.size:
            raise ValueError("potential table needs matching, non-empty r and q columns")
        if np.any(~np.isfinite(r)) or np.any(~np.isfinite(q)):
            raise ValueError("potential table must be finite")
        if np.any(r <= 0) or np.any(r > 1):
            raise ValueError("potential samples must lie in (0, 1]")
        if np.any(np.diff(r) <= 0):
            raise ValueError("r values must be strictly increasing")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "q", q)

    @classmethod
    def zero(cls) -> "RadialPotential":
        return cls(np.array([1.0]), np.array([0.0]), label="zero")

    @classmethod
    def constant(cls, value: float) -> "RadialPotential":
        return cls(np.array([1.0]), np.array([float(value)]), label=f"constant:{float(value)!r}")

    @classmethod
    def from_csv(cls, path: str | Path) -> "RadialPotential":
        r, q = read_potential_table(path)
        return cls(np.array(r), np.array(q), label=f"csv:{path}")

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.q)))

    @property
    def supremum(self) -> float:
        return float(np.max(self.q))

    @property
    def infimum(self) -> float:
        return float(np.min(self.q))

    @property
    def constant_value(self) -> float | None:
        if np.ptp(self.q) == 0.0:
            return float(self.q[0])
        return None

    def __call__(self, r):
        values = np.interp(r, self.r, self.q)
        return float(values) if np.ndim(values) == 0 else values

    def shifted(self, c: float) -> "RadialPotential":
        if c == 0.0:
            return self
        base = self.constant_value
        if base is not None:
            return RadialPotential.constant(base + c)
        return RadialPotential(self.r, self.q + c, label=f"{self.label}+{c!r}")


@dataclass(frozen=True)
class ModeIndex:
    n: int
    mu: float

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("mode index must be nonnegative")
        if self.n >= 1 and self.mu != self.n * self.n:
            raise ValueError("mu must equal n^2 for n >= 1")
        if self.n == 0 and not self.mu < 0:
            raise ValueError("mu must equal -1/b^2 for n = 0")

    @classmethod
    def for_mode(cls, n: int, b: float) -> "ModeIndex":
        return cls(n, -1.0 / (b * b) if n == 0 else float(n * n))

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(-self.mu) if self.n == 0 else 1.0 / self.n

    @property
    def drift(self) -> float:
        # rate of the free phase removed from the stored angle
        return 1.0 / self.sigma if self.n == 0 else 0.0


def choose_delta(lam: complex, q: RadialPotential, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    scale = abs(lam) + q.sup_norm
    if scale == 0.0:
        return tol.delta_max
    return min(tol.delta_max, math.sqrt(tol.delta_perturbation / scale))


# --- Pruefer integration -----------------------------------------------------


def _weight(q: RadialPotential, lam: complex) -> Callable[[float], complex]:
    base = q.constant_value
    if base is not None:
        gap = base - lam
        return lambda t: math.exp(2.0 * t) * gap
    rs, qs = q.r, q.q
    return lambda t: math.exp(2.0 * t) * (float(np.interp(math.exp(t), rs, qs)) - lam)


def _prufer_system(mode: ModeIndex, w: Callable[[float], float]):
    if mode.n == 0:
        b = mode.sigma

        def fun(t: float, y: np.ndarray) -> np.ndarray:
            wt = w(t)
            angle = y[0] + t / b
            s, c = math.sin(angle), math.cos(angle)
            if y.shape[0] == 1:
                return np.array([-b * wt * s * s])
            return np.array([-b * wt * s * s, b * wt * s * c])

        def jac(t: float, y: np.ndarray) -> np.ndarray:
            wt = w(t)
            angle = y[0] + t / b
            if y.shape[0] == 1:
                return np.array([[-b * wt * math.sin(2 * angle)]])
            return np.array([[-b * wt * math.sin(2 * angle), 0.0], [b * wt * math.cos(2 * angle), 0.0]])

        return fun, jac

    n = float(mode.n)

    def fun(t: float, y: np.ndarray) -> np.ndarray:
        big_q = -n * n - w(t)
        s, c = math.sin(y[0]), math.cos(y[0])
        d_angle = n * c * c + big_q / n * s * s
        if y.shape[0] == 1:
            return np.array([d_angle])
        return np.array([d_angle, s * c * (n - big_q / n)])

    def jac(t: float, y: np.ndarray) -> np.ndarray:
        big_q = -n * n - w(t)
        if y.shape[0] == 1:
            return np.array([[math.sin(2 * y[0]) * (big_q / n - n)]])
        return np.array(
            [[math.sin(2 * y[0]) * (big_q / n - n), 0.0], [math.cos(2 * y[0]) * (n - big_q / n), 0.0]]
        )

    return fun, jac


def _stiff_boundary(mode: ModeIndex, lam: float, q: RadialPotential, tol: Tolerances) -> float | None:
    """Smallest t beyond which the local exponential rate exceeds stiff_rate."""
    growth = q.supremum - lam
    target = (tol.stiff_rate / 2.0) ** 2 - mode.mu
    if target <= 0:
        return -math.inf
    if growth <= 0:
        return None
    t_s = 0.5 * math.log(target / growth)
    return t_s if t_s < 0 else None


def _local_rate(mode: ModeIndex, lam: float, q: RadialPotential, t: float) -> float:
    """Upper bound on sqrt(mu + e^{2t}(q - lam)), the exponential rate of the channel at t."""
    return math.sqrt(max(mode.mu + math.exp(2.0 * t) * (q.supremum - lam), 0.0))


def _plan(mode: ModeIndex, lam: float, q: RadialPotential, t_start: float, t_end: float, tol: Tolerances):
    lo, hi = min(t_start, t_end), max(t_start, t_end)
    t_s = _stiff_boundary(mode, lam, q, tol)
    if t_s is None or t_s >= hi:
        parts = [(lo, hi, "DOP853")]
    elif t_s <= lo:
        parts = [(lo, hi, "Radau")]
    else:
        parts = [(lo, t_s, "DOP853"), (t_s, hi, "Radau")]
    if t_start > t_end:
        parts = [(b, a, m) for a, b, m in reversed(parts)]
    return parts


@dataclass(frozen=True)
class _Segment:
    t_a: float
    t_b: float
    sol: object
    kind: str
    log_offset: float = 0.0

    def contains(self, t: float) -> bool:
        return min(self.t_a, self.t_b) <= t <= max(self.t_a, self.t_b)


def _integrate_prufer(
    mode: ModeIndex,
    lam: float,
    q: RadialPotential,
    t_start: float,
    t_end: float,
    y0: Sequence[float],
    tol: Tolerances,
    dense: bool = False,
) -> tuple[np.ndarray, list[_Segment]]:
    fun, jac = _prufer_system(mode, _weight(q, lam))
    y = np.asarray(y0, dtype=float)
    segments: list[_Segment] = []
    for a, b, method in _plan(mode, lam, q, t_start, t_end, tol):
        if a == b:
            continue
        options = {}
        if method == "Radau":
            # first step on the scale of the local rate
            options = {"jac": jac, "first_step": min(abs(b - a), 1.0 / max(_local_rate(mode, lam, q, a), 1.0))}
        sol = solve_ivp(
            fun, (a, b), y, method=method, rtol=tol.ode_rtol, atol=tol.ode_atol, dense_output=dense, **options
        )
        if not sol.success:
            raise IntegrationError(f"radial integration failed ({method}): {sol.message}", r=math.exp(sol.t[-1]))
        y = sol.y[:, -1]
        segments.append(_Segment(a, b, sol.sol if dense else None, "prufer"))
    return y, segments


def _integrate_linear(
    mode: ModeIndex,
    lam: complex,
    q: RadialPotential,
    t_start: float,
    t_end: float,
    y0: Sequence[complex],
    tol: Tolerances,
    dense: bool = False,
) -> tuple[np.ndarray, float, list[_Segment]]:
    """Returns the end state scaled to unit size, its log scale, and the segments."""
    w = _weight(q, lam)
    mu = mode.mu

    def fun(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], (mu + w(t)) * y[0]])

    rate = math.sqrt(abs(mu) + q.sup_norm + abs(lam))
    piece = min(1.0, 20.0 / max(rate, 1.0))
    count = max(1, math.ceil(abs(t_end - t_start) / piece))
    edges = np.linspace(t_start, t_end, count + 1)
    y = np.asarray(y0, dtype=complex)
    log_offset = 0.0
    segments: list[_Segment] = []
    for a, b in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(fun, (a, b), y, method="DOP853", rtol=tol.ode_rtol, atol=tol.ode_atol, dense_output=dense)
        if not sol.success:
            raise IntegrationError(f"complex radial integration failed: {sol.message}", r=math.exp(sol.t[-1]))
        segments.append(_Segment(float(a), float(b), sol.sol if dense else None, "linear", log_offset))
        end = sol.y[:, -1]
        scale = float(np.max(np.abs(end)))
        if scale == 0.0 or not math.isfinite(scale):
            raise IntegrationError("complex radial integration lost the solution", r=math.exp(b))
        y = end / scale
        log_offset += math.log(scale)
    return y, log_offset, segments


# --- solutions and brackets ----------------------------------------------------


class BracketOperand(Protocol):
    def state(self, r: float) -> tuple[float, complex, complex]: ...


@dataclass(frozen=True)
class FreeSolution:
    """alpha*sin(log r / b) + gamma*cos(log r / b): the n = 0 channel at lam = 0, q = 0."""

    b: float
    sin_coeff: float = 1.0
    cos_coeff: float = 0.0

    def state(self, r: float) -> tuple[float, complex, complex]:
        phase = math.log(r) / self.b
        s, c = math.sin(phase), math.cos(phase)
        value = self.sin_coeff * s + self.cos_coeff * c
        r_derivative = (self.sin_coeff * c - self.cos_coeff * s) / self.b
        return 0.0, value, r_derivative


def u0(b: float) -> FreeSolution:
    return FreeSolution(b, 1.0, 0.0)


def v0(b: float) -> FreeSolution:
    return FreeSolution(b, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """A channel solution on [delta, 1].

    ``value`` and ``r_derivative`` hold checkpoint samples scaled by
    exp(-log_scale); ``state`` gives (log amplitude, unit value, unit r*derivative)
    anywhere on the grid from the dense output.
    """

    mode: ModeIndex
    lam: complex
    delta: float
    t: np.ndarray
    value: np.ndarray
    r_derivative: np.ndarray
    log_scale: float
    segments: tuple[_Segment, ...] = field(repr=False)

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.t)

    def _segment(self, t: float) -> _Segment:
        for segment in self.segments:
            if segment.contains(t):
                return segment
        if t < min(self.t[0], self.t[-1]) - 1e-12 or t > 1e-12:
            raise ValueError(f"r={math.exp(t):.6g} outside the solution grid")
        return min(self.segments, key=lambda s: min(abs(s.t_a - t), abs(s.t_b - t)))

    def state(self, r: float) -> tuple[float, complex, complex]:
        t = math.log(r)
        segment = self._segment(t)
        y = segment.sol(min(max(t, min(segment.t_a, segment.t_b)), max(segment.t_a, segment.t_b)))
        if segment.kind == "linear":
            return segment.log_offset, complex(y[0]), complex(y[1])
        angle = float(y[0]) + self.mode.drift * t
        return float(y[1]), math.sin(angle), math.cos(angle) / self.mode.sigma

    def evaluate(self, r: float) -> tuple[complex, complex]:
        log_amp, value, r_derivative = self.state(r)
        factor = math.exp(log_amp - self.log_scale)
        return value * factor, r_derivative * factor

    def ode_residual(self) -> float:
        """Largest relative mismatch between d(psi)/dt and the stored r*derivative at checkpoint midpoints."""
        mids = 0.5 * (self.t[1:] + self.t[:-1])
        h = 1e-5
        worst = 0.0
        for t in mids[1:-1]:
            plus, _ = self.evaluate(math.exp(t + h))
            minus, _ = self.evaluate(math.exp(t - h))
            value, r_derivative = self.evaluate(math.exp(t))
            scale = max(abs(value), abs(self.mode.sigma * r_derivative), 1e-300)
            worst = max(worst, abs((plus - minus) / (2 * h) - r_derivative) / scale)
        return worst


def lagrange_bracket_1d(phi: BracketOperand, psi: BracketOperand, r: float) -> complex:
    """phi * r psi' - r phi' * psi at r."""
    la, v1, d1 = phi.state(r)
    lb, v2, d2 = psi.state(r)
    bracket = v1 * d2 - d1 * v2
    if la + lb == 0.0:
        return bracket
    return bracket * math.exp(la + lb)


def beta_bracket(phi: BracketOperand, params: BoundaryParams, r: float, normalized: bool = False) -> complex:
    """[phi, u0 + beta v0](r); ``normalized`` divides by |phi| |u0 + beta v0| / b."""
    reference = FreeSolution(params.b, 1.0, params.beta)
    if not normalized:
        return lagrange_bracket_1d(phi, reference, r)
    _, value, r_derivative = phi.state(r)
    _, w, w_derivative = reference.state(r)
    size = math.hypot(abs(value), abs(params.b * r_derivative))
    if size == 0.0:
        return 0.0
    return (value * w_derivative - r_derivative * w) * params.b / (size * math.sqrt(1.0 + params.beta**2))


def determinant_identity(u1: BracketOperand, u2: BracketOperand, b: float, r: float) -> tuple[complex, complex]:
    """Both sides of [u1,u2] = b([u1,v0][u2,u0] - [u1,u0][u2,v0]) at r."""
    lhs = lagrange_bracket_1d(u1, u2, r)
    rhs = b * (
        lagrange_bracket_1d(u1, v0(b), r) * lagrange_bracket_1d(u2, u0(b), r)
        - lagrange_bracket_1d(u1, u0(b), r) * lagrange_bracket_1d(u2, v0(b), r)
    )
    return lhs, rhs


def _default_outward_state(mode: ModeIndex, t_min: float, params: BoundaryParams | None) -> tuple[float, float]:
    """(stored angle, log rho) of the selected solution at t_min."""
    if mode.n >= 1:
        # Frobenius data r^n: theta = pi/4 for sigma = 1/n
        return math.pi / 4, mode.n * t_min + 0.5 * math.log(2.0)
    if params is None:
        raise ValueError("outward integration of the n=0 channel needs BoundaryParams or initial data")
    return params.atan_beta, 0.5 * math.log1p(params.beta**2)


def _initial_from_data(mode: ModeIndex, t0: float, value: float, r_derivative: float) -> tuple[float, float]:
    rho = math.hypot(value, mode.sigma * r_derivative)
    if rho == 0.0:
        raise ValueError("initial data must be nonzero")
    angle = math.atan2(value, mode.sigma * r_derivative) - mode.drift * t0
    return angle, math.log(rho)


def integrate_radial(
    mode: ModeIndex,
    lam: complex,
    q: RadialPotential,
    direction: Direction = "inward",
    initial: tuple[complex, complex] | None = None,
    params: BoundaryParams | None = None,
    delta: float | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RadialSolution:
    """Integrate one channel across [delta, 1].

    ``initial`` is (value, r*derivative) at the starting end: r = 1 for
    ``inward`` (default (0, 1)) and r = delta for ``outward`` (default: the
    Frobenius solution r^n for n >= 1, u0 + beta v0 for n = 0).
    """
    if not cmath.isfinite(lam):
        raise ValueError("lambda must be finite")
    delta = choose_delta(lam, q, tol) if delta is None else delta
    if not 0.0 < delta <= 0.1:
        raise ValueError("delta must lie in (0, 0.1]")
    t_min = math.log(delta)
    t_start, t_end = (0.0, t_min) if direction == "inward" else (t_min, 0.0)

    if isinstance(lam, complex) and lam.imag != 0.0:
        if initial is None:
            if direction == "inward":
                initial = (0.0, 1.0)
            elif mode.n >= 1:
                initial = (1.0, float(mode.n))
            else:
                if params is None:
                    raise ValueError("outward n=0 integration needs BoundaryParams")
                phase = t_min / params.b + params.atan_beta
                initial = (math.sin(phase), math.cos(phase) / params.b)
        _, _, segments = _integrate_linear(mode, lam, q, t_start, t_end, initial, tol, dense=True)
    else:
        lam = float(lam.real) if isinstance(lam, complex) else float(lam)
        if initial is not None:
            start = _initial_from_data(mode, t_start, float(initial[0].real), float(initial[1].real))
        elif direction == "inward":
            start = _initial_from_data(mode, 0.0, 0.0, 1.0)
        else:
            start = _default_outward_state(mode, t_min, params)
        _, segments = _integrate_prufer(mode, lam, q, t_start, t_end, start, tol, dense=True)

    grid = np.linspace(t_min, 0.0, tol.checkpoints)
    solution = RadialSolution(mode, lam, delta, grid, np.empty(0), np.empty(0), 0.0, tuple(segments))
    states = [solution.state(math.exp(t)) for t in grid]
    log_amp = np.array([s[0] for s in states])
    log_scale = float(np.max(log_amp))
    factors = np.exp(log_amp - log_scale)
    values = np.array([s[1] for s in states]) * factors
    r_derivatives = np.array([s[2] for s in states]) * factors
    return RadialSolution(mode, lam, delta, grid, values, r_derivatives, log_scale, tuple(segments))


# --- phase functions used by the eigen-solvers ------------------------------------


def l0_shooting_phase(
    params: BoundaryParams,
    lam: float,
    q: RadialPotential,
    t_min: float,
    robin_slope: float | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """F(lam) = theta(t_min) - t_min/b - atan(beta) for the inward shot from r = 1.

    The shot starts from phi(1) = 0 or, with ``robin_slope`` s, from
    psi(0) = 1, psi_t(0) = s.  F is decreasing in lam and lam is an
    eigenvalue exactly when F is a multiple of pi.  When the exponential
    rate at r = 1 exceeds ``stiff_rate`` the shot starts at the stiff boundary
    on the WKB solution growing toward r = 0; the discarded part decays like
    exp(-2 * stiff_rate / 2) across the skipped interval.
    """
    mode = ModeIndex.for_mode(0, params.b)
    if robin_slope is None:
        start = 0.0
    else:
        start = arccot(params.b * robin_slope)
    t_start = 0.0
    edge = _growing_angle(mode, lam, q, 0.0)
    t_s = _stiff_boundary(mode, lam, q, tol)
    rate = math.sqrt(max(mode.mu + q(1.0) - lam, 0.0))
    if edge is not None and t_s is not None and rate >= tol.stiff_rate:
        # past a layer of width 1/rate the shot follows the solution growing toward r = 0
        t_start = max(t_s, t_min)
        turn = 0.0 if start <= -edge else math.pi
        settled = _growing_angle(mode, lam, q, t_start)
        if settled is None:
            raise IntegrationError("channel is not exponential at the stiff boundary", r=math.exp(t_start))
        start = settled + turn - mode.drift * t_start
    if t_start == t_min:
        return start - params.atan_beta
    y, _ = _integrate_prufer(mode, lam, q, t_start, t_min, [start], tol)
    return float(y[0]) - params.atan_beta


def _growing_angle(mode: ModeIndex, lam: float, q: RadialPotential, t: float) -> float | None:
    """Pruefer angle at t of the WKB solution growing toward r = 0, or None where the channel oscillates.

    psi_t/psi = -sqrt(Q) - Q'/(4Q) with Q = mu + e^{2t}(q - lam) and Q' taken as 2 e^{2t}(q - lam).
    """
    gap = math.exp(2.0 * t) * (q(math.exp(t)) - lam)
    big_q = mode.mu + gap
    if big_q <= 0.0:
        return None
    log_derivative = -math.sqrt(big_q) - gap / (2.0 * big_q)
    return math.atan(1.0 / (mode.sigma * log_derivative))


def outward_phase(
    mode: ModeIndex,
    lam: float,
    q: RadialPotential,
    params: BoundaryParams | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    t_min: float | None = None,
) -> float:
    """Stored angle at r = 1 of the selected solution (theta(0), increasing in lam)."""
    if t_min is None:
        t_min = math.log(choose_delta(lam, q, tol))
    start = _default_outward_state(mode, t_min, params)[0]
    y, _ = _integrate_prufer(mode, lam, q, t_min, 0.0, [start], tol)
    return float(y[0])


# --- m-functions -------------------------------------------------------------------


def _closed_form_m(n: int, lam: complex, pole_tol: float) -> complex:
    """-kappa I_n'(kappa)/I_n(kappa), kappa = sqrt(-lam): the q = 0 limit-point channel."""
    if lam == 0:
        return complex(-n)
    kappa = cmath.sqrt(-lam)
    centre = special.ive(n, kappa)
    lower = special.ive(n - 1, kappa)
    upper = special.ive(n + 1, kappa)
    if centre != 0 and np.isfinite(centre) and np.isfinite(lower) and np.isfinite(upper):
        if abs(centre) < pole_tol * 0.5 * (abs(lower) + abs(upper)):
            raise PoleAtLambda(n, lam)
        return complex(-kappa * (lower + upper) / (2.0 * centre))
    with mpmath.workdps(30):
        z = mpmath.mpc(kappa.real, kappa.imag)
        value = -z * mpmath.besseli(n, z, derivative=1) / mpmath.besseli(n, z)
    return complex(value)


def m_function(
    mode: ModeIndex,
    lam: complex,
    q: RadialPotential,
    params: BoundaryParams,
    tol: Tolerances = DEFAULT_TOLERANCES,
    method: Literal["auto", "ode", "closed_form"] = "auto",
) -> complex | float:
    """m_n(lam) = -phi'(1)/phi(1) for the channel solution selected at r = 0."""
    is_real = not (isinstance(lam, complex) and lam.imag != 0.0)
    base = q.constant_value
    if mode.n >= 1 and base is not None and method != "ode":
        value = _closed_form_m(mode.n, complex(lam) - base, tol.pole_tol)
        return float(value.real) if is_real else value
    if method == "closed_form":
        raise ValueError("closed form m-function needs n >= 1 and a constant potential")

    if is_real:
        lam = float(lam.real) if isinstance(lam, complex) else float(lam)
        angle = outward_phase(mode, lam, q, params, tol)
        if abs(math.sin(angle)) < tol.pole_tol:
            raise PoleAtLambda(mode.n, lam)
        return -math.cos(angle) / (math.sin(angle) * mode.sigma)

    t_min = math.log(choose_delta(lam, q, tol))
    if mode.n >= 1:
        start = (1.0, float(mode.n))
    else:
        phase = t_min / params.b + params.atan_beta
        start = (math.sin(phase), math.cos(phase) / params.b)
    end, _, _ = _integrate_linear(mode, lam, q, t_min, 0.0, start, tol)
    if abs(end[0]) < tol.pole_tol * float(np.max(np.abs(end))):
        raise PoleAtLambda(mode.n, lam)
    return complex(-end[1] / end[0])


def sample_m_function(
    mode: ModeIndex,
    lams: Sequence[complex],
    q: RadialPotential,
    params: BoundaryParams,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[MFunctionSample]:
    samples = []
    for lam in lams:
        try:
            value = m_function(mode, lam, q, params, tol)
        except PoleAtLambda:
            LOG.info("m_%d has a pole at lambda=%r", mode.n, lam)
            value = complex(math.inf)
        samples.append(MFunctionSample(mode.n, lam, value))
    return samples
