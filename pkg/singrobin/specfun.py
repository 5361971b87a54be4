"""Bessel functions of integer order and of purely imaginary order i/b.

Imaginary-order functions are summed from their power series up to
``x_switch`` and continued beyond by integrating the Bessel equation in the
form Z' = D/x, D' = (s x - nu^2/x) Z with D = x Z'.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special
from scipy.integrate import quad, solve_ivp

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ConvergenceError

LOG = logging.getLogger("singrobin.specfun")

_EPS = np.finfo(float).eps
_MAX_TERMS = 2000

Kind = Literal["J", "Y", "I"]


@dataclass(frozen=True)
class ImagOrder:
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"order parameter b must be positive and finite, got {self.b}")

    @property
    def nu(self) -> float:
        return 1.0 / self.b


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("complex value is not finite")

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        return cls(float(value.real), float(value.imag))

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)


@dataclass(frozen=True)
class ImagOrderEvaluation:
    value: complex
    x_derivative: complex
    method: str
    cancellation: float


# integer order


def bessel_j(n: int, x: float) -> float:
    if n < 0 or x <= 0:
        raise ValueError("bessel_j needs n >= 0 and x > 0")
    if n > x:
        log_size = n * math.log(x / 2.0) - special.gammaln(n + 1.0)
        if log_size < -745.0:
            LOG.debug("J_%d(%g) underflows to zero", n, x)
            return 0.0
    return float(special.jv(n, x))


def bessel_y(n: int, x: float) -> float:
    if n < 0 or x <= 0:
        raise ValueError("bessel_y needs n >= 0 and x > 0")
    return float(special.yv(n, x))


def bessel_i(n: int, x: float) -> float:
    if n < 0 or x <= 0:
        raise ValueError("bessel_i needs n >= 0 and x > 0")
    return float(special.iv(n, x))


def bessel_j_series(n: int, x: float) -> float:
    """Defining power series of J_n; the oracle for root bisection."""
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    half = x / 2.0
    term = math.exp(n * math.log(half) - special.gammaln(n + 1.0))
    total = term
    for k in range(1, _MAX_TERMS):
        term *= -half * half / (k * (k + n))
        total += term
        if k > half and abs(term) <= 1e-17 * abs(total):
            break
    return total


def bessel_zero_bisect(n: int, lo: float, hi: float, xtol: float = 1e-14) -> float:
    f_lo = bessel_j_series(n, lo)
    f_hi = bessel_j_series(n, hi)
    if f_lo * f_hi > 0:
        raise ValueError(f"no sign change of J_{n} on [{lo}, {hi}]")
    while hi - lo > xtol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j_series(n, mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


# imaginary order


def gamma_phase(b: float) -> float:
    """arg Gamma(1 + i/b), continuous branch from loggamma."""
    return float(special.loggamma(1.0 + 1j / b).imag)


def _series(nu: float, x: float, sign: int) -> tuple[complex, complex, float]:
    half = x / 2.0
    mu = 1j * nu
    term = cmath.exp(mu * math.log(half) - special.loggamma(1.0 + mu))
    total = term
    x_derivative = mu * term
    largest = abs(term)
    for k in range(1, _MAX_TERMS):
        term *= sign * half * half / (k * (k + mu))
        total += term
        x_derivative += (2 * k + mu) * term
        largest = max(largest, abs(term))
        if k > half and abs(term) <= 1e-17 * abs(total):
            break
    else:
        raise ConvergenceError(f"imaginary-order series did not converge at x={x}")
    cancellation = largest * _EPS / abs(total) if total != 0 else math.inf
    return total, x_derivative, cancellation


def _continue(nu: float, sign: int, x0: float, z0: complex, d0: complex, x: float, rtol: float) -> tuple[complex, complex]:
    nu2 = nu * nu

    def rhs(s: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1] / s, (sign * s - nu2 / s) * y[0]])

    y0 = np.array([z0, d0], dtype=complex)
    sol = solve_ivp(
        rhs,
        (x0, x),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=1e-14 * float(np.max(np.abs(y0))),
    )
    if not sol.success:
        raise ConvergenceError(f"Bessel equation integration failed: {sol.message}")
    return complex(sol.y[0, -1]), complex(sol.y[1, -1])


def _modified_or_plain(
    sign: int,
    b: float,
    x: float,
    method: str,
    tol: Tolerances,
) -> ImagOrderEvaluation:
    nu = ImagOrder(b).nu
    if method == "series" or (method == "auto" and x <= tol.x_switch):
        value, x_derivative, cancellation = _series(nu, x, sign)
        used = "series"
    elif method in {"auto", "ode"}:
        x0 = tol.x_switch if method == "auto" else min(0.25, x / 2.0)
        z0, d0, cancellation = _series(nu, x0, sign)
        value, x_derivative = _continue(nu, sign, x0, z0, d0, x, rtol=1e-12)
        used = "ode"
    else:
        raise ValueError(f"unknown method {method!r}")
    if cancellation > tol.cancellation_warn:
        LOG.warning("loss of precision in order i/%g at x=%g: relative cancellation %.2e", b, x, cancellation)
    return ImagOrderEvaluation(value, x_derivative, used, cancellation)


def evaluate_imag_order(
    kind: Kind,
    b: float,
    x: float,
    method: str = "auto",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ImagOrderEvaluation:
    """Value and x-derivative x*Z'(x) of J, Y or I of order i/b at real x > 0."""
    if not 0.0 < x <= 100.0:
        raise ValueError(f"x must lie in (0, 100], got {x}")
    if kind == "I":
        return _modified_or_plain(+1, b, x, method, tol)
    j = _modified_or_plain(-1, b, x, method, tol)
    if kind == "J":
        return j
    if kind != "Y":
        raise ValueError(f"unknown kind {kind!r}")
    # J_{-i nu}(x) = conj(J_{i nu}(x)) for real x
    nu = 1.0 / b
    c, s = math.cosh(math.pi * nu), 1j * math.sinh(math.pi * nu)
    value = (j.value * c - j.value.conjugate()) / s
    x_derivative = (j.x_derivative * c - j.x_derivative.conjugate()) / s
    return ImagOrderEvaluation(value, x_derivative, j.method, j.cancellation)


def bessel_imag_order(kind: Kind, b: float, x: float, tol: Tolerances = DEFAULT_TOLERANCES) -> ComplexValue:
    return ComplexValue.from_complex(evaluate_imag_order(kind, b, x, tol=tol).value)


def bessel_k_imag_order(b: float, x: float, scaled: bool = False) -> float:
    """K_{i/b}(x) from its integral representation; ``scaled`` multiplies by e^x."""
    if x <= 0:
        raise ValueError("x must be positive")
    nu = ImagOrder(b).nu
    upper = math.acosh(1.0 + 745.0 / x)
    value, _abserr, *rest = quad(
        lambda t: math.exp(-x * (math.cosh(t) - 1.0)),
        0.0,
        upper,
        weight="cos",
        wvar=nu,
        epsabs=0.0,
        epsrel=1e-11,
        limit=1000,
        full_output=1,
    )
    if len(rest) > 1:
        LOG.debug("K_{i/%g}(%g) quadrature: %s", b, x, rest[1])
    return value if scaled else value * math.exp(-x)


def hankel_imag_order(sign: int, b: float, x: float, tol: Tolerances = DEFAULT_TOLERANCES) -> ComplexValue:
    """H^{(1)} (sign=+1) or H^{(2)} (sign=-1) of order i/b at the imaginary point ix."""
    k = bessel_k_imag_order(b, x)
    h_plus = -2j / math.pi * math.exp(math.pi / (2.0 * b)) * k
    if sign > 0:
        return ComplexValue.from_complex(h_plus)
    i_value = evaluate_imag_order("I", b, x, tol=tol).value
    return ComplexValue.from_complex(2.0 * math.exp(-math.pi / (2.0 * b)) * i_value - h_plus)


def hankel_imag_order_asymptotic(b: float, x: float, sign: int = 1) -> ComplexValue:
    if x < 10:
        raise ValueError("the large-argument Hankel model needs x >= 10")
    nu = ImagOrder(b).nu
    phase = -1j * (1 + sign) * math.pi / 4 + sign * math.pi * nu / 2
    value = math.sqrt(2.0 / math.pi) * cmath.exp(phase) * math.exp(-sign * x) / math.sqrt(x)
    return ComplexValue.from_complex(value)
