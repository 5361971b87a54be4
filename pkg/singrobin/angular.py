from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.integrate import quad

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import QuadratureError

LOG = logging.getLogger("singrobin.angular")

HALF_PI = math.pi / 2

Parity = Literal["zeroth", "even", "odd"]


def _parity(n: int) -> Parity:
    if n == 0:
        return "zeroth"
    return "even" if n % 2 == 0 else "odd"


def _sine_coefficient(n: int, b: float) -> float:
    # Theta_n = cos(n theta) + c sin(n theta) satisfies b Theta' + Theta = 0 at +-pi/2
    return n * b if n % 2 else -1.0 / (n * b)


def normalization_constant(n: int, b: float) -> float:
    if n < 0 or b <= 0:
        raise ValueError("normalization_constant needs n >= 0 and b > 0")
    if n == 0:
        return 1.0 / math.sqrt(b * math.sinh(math.pi / b))
    c = _sine_coefficient(n, b)
    return 1.0 / math.sqrt(HALF_PI * (1.0 + c * c))


@dataclass(frozen=True)
class AngularMode:
    n: int
    mu: float
    parity: Parity
    k_n: float
    b: float

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.n == 0:
            values = self.k_n * np.exp(-theta / self.b)
        else:
            c = _sine_coefficient(self.n, self.b)
            values = self.k_n * (np.cos(self.n * theta) + c * np.sin(self.n * theta))
        return float(values) if values.ndim == 0 else values

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.n == 0:
            values = -self.k_n / self.b * np.exp(-theta / self.b)
        else:
            n, c = self.n, _sine_coefficient(self.n, self.b)
            values = self.k_n * n * (c * np.cos(n * theta) - np.sin(n * theta))
        return float(values) if values.ndim == 0 else values


def angular_eigenpair(n: int, b: float) -> AngularMode:
    mu = -1.0 / (b * b) if n == 0 else float(n * n)
    return AngularMode(n, mu, _parity(n), normalization_constant(n, b), b)


@dataclass(frozen=True)
class GramProjection:
    coefficients: np.ndarray
    errors: np.ndarray
    failed: list[int]


def gram_project(
    g: Callable[[float], float],
    N: int,
    b: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
    strict: bool = True,
) -> GramProjection:
    """Coefficients <g, Theta_n>, n = 0..N, by adaptive quadrature.

    Unconverged coefficients raise QuadratureError; with ``strict=False``
    they are only logged and listed in ``failed``.
    """
    if not 0 <= N <= 200:
        raise ValueError("truncation N must lie in [0, 200]")
    coefficients = np.zeros(N + 1)
    errors = np.zeros(N + 1)
    failed: list[int] = []
    options = {"epsabs": tol.quad_atol, "epsrel": 1e-10, "limit": 400, "full_output": 1}
    for n in range(N + 1):
        mode = angular_eigenpair(n, b)
        if n == 0:
            parts = [quad(lambda t: g(t) * mode(t), -HALF_PI, HALF_PI, **options)]
            weights = [1.0]
        else:
            parts = [
                quad(g, -HALF_PI, HALF_PI, weight="cos", wvar=n, **options),
                quad(g, -HALF_PI, HALF_PI, weight="sin", wvar=n, **options),
            ]
            weights = [mode.k_n, mode.k_n * _sine_coefficient(n, b)]
        coefficients[n] = sum(w * part[0] for w, part in zip(weights, parts))
        errors[n] = sum(abs(w) * part[1] for w, part in zip(weights, parts))
        if any(len(part) > 3 for part in parts):
            failed.append(n)
    if failed and strict:
        raise QuadratureError("quadrature did not converge for coefficients", failed)
    if failed:
        LOG.warning("quadrature did not converge for coefficients %s", failed)
    return GramProjection(coefficients, errors, failed)


def gauss_grid(count: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(count)
    return HALF_PI * nodes, HALF_PI * weights


def basis_matrix(b: float, N: int, theta: np.ndarray) -> np.ndarray:
    """Rows Theta_0..Theta_N evaluated at ``theta``."""
    return np.vstack([angular_eigenpair(n, b)(theta) for n in range(N + 1)])


def projection_tail(g: Callable[[np.ndarray], np.ndarray], coefficients: np.ndarray, b: float, nodes: int = 2000) -> float:
    """L2 norm of g minus its truncated expansion, by Gauss-Legendre quadrature."""
    theta, weights = gauss_grid(nodes)
    remainder = np.asarray(g(theta), dtype=float) - coefficients @ basis_matrix(b, len(coefficients) - 1, theta)
    return float(math.sqrt(max(np.sum(weights * remainder**2), 0.0)))
