"""Interface Dirichlet-to-Neumann pencil Lambda_1(lam) + Lambda_0(lam) on the
unit semicircle r = 1.

Omega_1 is the unit half-disc carrying the singular Robin condition on its
diameter; Omega_0 is the half-annulus 1 < r < R with Dirichlet data on its
outer arc and on the two straight segments.  Lambda_1 is diagonal in the
angular basis Theta_n with entries m_n(lam).  Lambda_0 is diagonal in the
Dirichlet sine basis of Omega_0 and reaches the Theta_n basis through the
Gram matrix S, so Lambda_0 = S D S^T.
"""
from __future__ import annotations

import cmath
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from scipy import linalg, special
from scipy.optimize import brentq

from .angular import basis_matrix, gauss_grid
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ConvergenceError, NearDirichletEigenvalue, PoleAtLambda, SingularBlock, WindowTruncated
from .models import BoundaryParams, EigenvalueRecord, SpectrumWindow
from .radial import ModeIndex, RadialPotential, choose_delta, l0_shooting_phase, m_function
from .specfun import bessel_j, bessel_y
from .spectrum import eigenvalues_L0prime

LOG = logging.getLogger("singrobin.pencil")

DRIFT_WARN = 1e-6
# relative distance in log|lam| kept between a root and the m_0 poles
POLE_MARGIN = 1e-10


@dataclass(frozen=True)
class PencilGeometry:
    outer_radius: float = 2.0
    sine_modes: int | None = None

    def __post_init__(self) -> None:
        if not self.outer_radius > 1.0:
            raise ValueError("outer radius must exceed 1")

    def sine_count(self, N: int) -> int:
        return self.sine_modes if self.sine_modes is not None else max(4 * N, 120)


# --- Omega_0 --------------------------------------------------------------------


def sine_basis(K: int, theta: np.ndarray) -> np.ndarray:
    """Rows sqrt(2/pi) sin(k(theta + pi/2)), k = 1..K."""
    k = np.arange(1, K + 1)[:, None]
    return math.sqrt(2.0 / math.pi) * np.sin(k * (theta[None, :] + math.pi / 2))


@lru_cache(maxsize=16)
def _gram(b: float, N: int, K: int) -> np.ndarray:
    theta, weights = gauss_grid(max(400, 4 * (N + K)))
    matrix = (basis_matrix(b, N, theta) * weights) @ sine_basis(K, theta).T
    matrix.setflags(write=False)
    return matrix


def sine_gram_matrix(b: float, N: int, K: int) -> np.ndarray:
    """S[n, k-1] = <Theta_n, s_k> by Gauss-Legendre matrix quadrature."""
    return _gram(float(b), int(N), int(K))


def _scaled_parts(k: int, z: complex) -> tuple[complex, complex, complex, complex]:
    i = special.ive(k, z)
    di = 0.5 * (special.ive(k - 1, z) + special.ive(k + 1, z))
    kk = special.kve(k, z)
    dk = -0.5 * (special.kve(k - 1, z) + special.kve(k + 1, z))
    return i, di, kk, dk


def _radial_derivative_mp(k: int, kappa: complex, R: float) -> complex:
    with mpmath.workdps(40):
        z = mpmath.mpc(kappa.real, kappa.imag)
        zr = z * R
        i1, i_r = mpmath.besseli(k, z), mpmath.besseli(k, zr)
        k1, k_r = mpmath.besselk(k, z), mpmath.besselk(k, zr)
        di = (mpmath.besseli(k - 1, z) + mpmath.besseli(k + 1, z)) / 2
        dk = -(mpmath.besselk(k - 1, z) + mpmath.besselk(k + 1, z)) / 2
        value = z * (dk * i_r - di * k_r) / (k1 * i_r - i1 * k_r)
    return complex(value)


def dirichlet_radial_derivative(k: int, lam: complex, R: float, tol: Tolerances = DEFAULT_TOLERANCES) -> complex:
    """g_k'(1) for the radial factor with g_k(1) = 1, g_k(R) = 0 of (-Delta - lam) u = 0."""
    if k < 1:
        raise ValueError("sine modes start at k = 1")
    if lam == 0:
        ratio = R ** (-2.0 * k)
        return complex(-k * (1.0 + ratio) / (1.0 - ratio))
    kappa = cmath.sqrt(-complex(lam))
    i1, di1, k1, dk1 = _scaled_parts(k, kappa)
    i_r, _, k_r, _ = _scaled_parts(k, kappa * R)
    # I, K at kappa R carry e^{Re kappa R}, e^{-kappa R}; rho restores the ratio
    rho = cmath.exp((kappa + kappa.real) * (1.0 - R))
    parts = (i1, di1, k1, dk1, i_r, k_r)
    if all(cmath.isfinite(p) for p in parts) and i1 != 0 and i_r != 0 and k_r != 0:
        lead = k1 * i_r
        tail = i1 * k_r * rho
        denominator = lead - tail
        if abs(denominator) <= tol.pole_tol * (abs(lead) + abs(tail)):
            raise NearDirichletEigenvalue(f"lambda={lam!r} is close to a Dirichlet eigenvalue of the outer region (k={k})")
        return kappa * (dk1 * i_r - di1 * k_r * rho) / denominator
    LOG.debug("scaled Bessel factors out of range at k=%d, kappa=%s; using mpmath", k, kappa)
    return _radial_derivative_mp(k, kappa, R)


def omega0_dirichlet_ground_state(R: float = 2.0) -> float:
    """Lowest Dirichlet eigenvalue of the half-annulus 1 < r < R (k = 1 radial problem)."""
    if not R > 1.0:
        raise ValueError("outer radius must exceed 1")

    def cross(x: float) -> float:
        return bessel_j(1, x) * bessel_y(1, x * R) - bessel_j(1, x * R) * bessel_y(1, x)

    step = 0.01 * math.pi / (R - 1.0)
    x = step
    value = cross(x)
    for _ in range(100_000):
        following = cross(x + step)
        if value * following < 0:
            root = brentq(cross, x, x + step, xtol=1e-15, rtol=1e-14)
            return root * root
        x, value = x + step, following
    raise ConvergenceError("no Dirichlet eigenvalue found for the outer region")


def regime_threshold(q: RadialPotential, geometry: PencilGeometry = PencilGeometry()) -> float:
    """Below this value M + C is negative definite and the scalar reduction is valid.

    Uses the lower bound 1 + inf q for the ground state of L_1.
    """
    bottom = min(0.0, 1.0 + q.infimum, omega0_dirichlet_ground_state(geometry.outer_radius))
    return bottom - 1.0


def lambda0_block(
    lam: complex,
    b: float,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[complex, np.ndarray, np.ndarray]:
    """(a, b_vec, C) of Lambda_0(lam) in the Theta_0..Theta_N basis."""
    K = geometry.sine_count(N)
    S = sine_gram_matrix(b, N, K)
    D = np.array([dirichlet_radial_derivative(k, lam, geometry.outer_radius, tol) for k in range(1, K + 1)])
    if not isinstance(lam, complex) or lam.imag == 0.0:
        D = D.real
    full = (S * D) @ S.T
    return full[0, 0], full[1:, 0].copy(), full[1:, 1:].copy()


def lambda1_block(
    lam: complex,
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    include_m0: bool = True,
) -> np.ndarray:
    """Diagonal (m_0(lam), ..., m_N(lam)) of Lambda_1; entry 0 stays 0 without ``include_m0``."""
    real = not isinstance(lam, complex) or lam.imag == 0.0
    values = np.zeros(N + 1, dtype=float if real else complex)
    for n in range(0 if include_m0 else 1, N + 1):
        values[n] = m_function(ModeIndex.for_mode(n, params.b), lam, q, params, tol)
    return values


# --- slices -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PencilSlice:
    lam: complex
    N: int
    m0: complex
    a: complex
    b_vec: np.ndarray
    M_plus_C: np.ndarray

    @property
    def m0_plus_a(self) -> complex:
        return self.m0 + self.a

    def solve_block(self, rhs: np.ndarray) -> np.ndarray:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", linalg.LinAlgWarning)
                return linalg.solve(self.M_plus_C, rhs, assume_a="sym")
        except (linalg.LinAlgError, linalg.LinAlgWarning) as exc:
            raise SingularBlock(f"M + C is singular at lambda={self.lam!r}: {exc}") from exc

    def schur_slope(self) -> complex:
        """a - b^T (M + C)^{-1} b."""
        return self.a - self.b_vec @ self.solve_block(self.b_vec)

    def scalar_reduction(self) -> complex:
        return self.m0 + self.schur_slope()

    def min_eigenvalue(self) -> float:
        return float(linalg.eigvalsh(self.M_plus_C.real)[0])

    def symmetry_defect(self) -> float:
        scale = float(np.linalg.norm(self.M_plus_C))
        return float(np.linalg.norm(self.M_plus_C - self.M_plus_C.T)) / scale if scale else 0.0


def assemble_slice(
    lam: complex,
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
    include_m0: bool = True,
) -> PencilSlice:
    a, b_vec, C = lambda0_block(lam, params.b, N, geometry, tol)
    diagonal = lambda1_block(lam, params, q, N, tol, include_m0)
    return PencilSlice(lam, N, diagonal[0], a, b_vec, C + np.diag(diagonal[1:]))


def schur_slope(
    lam: complex,
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex:
    """Robin datum phi'(1)/phi(1) that the outer region imposes on the n = 0 channel."""
    return assemble_slice(lam, params, q, N, geometry, tol, include_m0=False).schur_slope()


def scalar_reduction_E(
    lam: complex,
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
    check_truncation: bool = False,
) -> complex:
    """E(lam) = m_0 + a - b^T (M + C)^{-1} b; real for real lam."""
    value = assemble_slice(lam, params, q, N, geometry, tol).scalar_reduction()
    if check_truncation:
        doubled = assemble_slice(lam, params, q, 2 * N, geometry, tol).scalar_reduction()
        drift = abs(doubled - value) / max(abs(doubled), 1.0)
        if drift > DRIFT_WARN:
            LOG.warning("E(%s) changes by %.2e between N=%d and N=%d", lam, drift, N, 2 * N)
    if not isinstance(lam, complex) or lam.imag == 0.0:
        return float(np.real(value))
    return complex(value)


def block_factorization_residual(
    lam: float,
    z: float,
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """|| (M+C)(lam+z) [I + X^{-1}(Y - X)]^{-1} X^{-1} - I || with X = (M+C)(lam), Y = (M+C)(lam+z)."""
    X = assemble_slice(lam, params, q, N, geometry, tol, include_m0=False)
    Y = assemble_slice(lam + z, params, q, N, geometry, tol, include_m0=False)
    identity = np.eye(N)
    X_inv = X.solve_block(identity)
    middle = identity + X_inv @ (Y.M_plus_C - X.M_plus_C)
    inverse = linalg.solve(middle, X_inv)
    return float(np.linalg.norm(Y.M_plus_C @ inverse - identity, ord=2))


# --- roots ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelCertificate:
    lam: float
    h: np.ndarray
    residual: float


def _certificate(
    lam: float,
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    geometry: PencilGeometry,
    branch: int,
    t_min: float,
    tol: Tolerances,
) -> KernelCertificate:
    piece = assemble_slice(lam, params, q, N, geometry, tol, include_m0=False)
    tail = -piece.solve_block(piece.b_vec)
    h = np.concatenate(([1.0], np.real(tail)))
    block = float(np.linalg.norm(piece.b_vec + piece.M_plus_C @ tail)) / float(np.linalg.norm(h))
    slope = float(np.real(piece.a + piece.b_vec @ tail))
    phase = l0_shooting_phase(params, lam, q, t_min, robin_slope=slope, tol=tol)
    # normalized beta-bracket of the channel solution carrying this Robin datum
    scalar = abs(math.sin(phase - branch * math.pi))
    return KernelCertificate(lam, h, math.hypot(scalar, block))


def _root_between(
    params: BoundaryParams,
    q: RadialPotential,
    N: int,
    geometry: PencilGeometry,
    lower: EigenvalueRecord,
    upper: EigenvalueRecord,
    t_min: float,
    tol: Tolerances,
) -> tuple[float, KernelCertificate]:
    """Root of E strictly between lower.lam and upper.lam, two consecutive m_0 poles."""
    k = lower.branch

    def g(s: float) -> float:
        lam = -math.exp(s)
        slope = float(np.real(schur_slope(lam, params, q, N, geometry, tol)))
        return l0_shooting_phase(params, lam, q, t_min, robin_slope=slope, tol=tol) - k * math.pi

    s_lo, s_hi = math.log(-upper.lam), math.log(-lower.lam)
    margin = POLE_MARGIN * max(1.0, abs(s_lo), abs(s_hi))
    s_lo, s_hi = s_lo + margin, s_hi - margin
    g_lo, g_hi = g(s_lo), g(s_hi)
    if g_hi <= 0.0:
        raise ConvergenceError(f"shooting phase does not exceed branch {k} at the pole {lower.lam!r}")
    if g_lo >= -tol.shoot_tol:
        # root sits on the upper pole to working precision
        s = s_lo
    else:
        s = brentq(g, s_lo, s_hi, xtol=1e-2 * tol.root_rtol, rtol=1e-14)
    lam = -math.exp(s)
    return lam, _certificate(lam, params, q, N, geometry, k, t_min, tol)


def pencil_poles(
    params: BoundaryParams,
    q: RadialPotential,
    window: SpectrumWindow,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[EigenvalueRecord]:
    """Negative poles of m_0 in the window, the L0' eigenvalues."""
    return [r for r in eigenvalues_L0prime(params, q, window, tol) if r.lam < 0.0]


def pencil_negative_eigenvalues(
    params: BoundaryParams,
    q: RadialPotential,
    window: SpectrumWindow,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> list[tuple[float, KernelCertificate]]:
    """Roots of E between consecutive m_0 poles inside the window, most negative first."""
    threshold = regime_threshold(q, geometry)
    if window.lambda_min >= threshold:
        raise WindowTruncated(f"window lies above the scalar-reduction threshold {threshold:g}")
    if window.lambda_max > threshold:
        LOG.warning("clipping pencil window top %g to the threshold %g", window.lambda_max, threshold)
        window = SpectrumWindow(lambda_min=window.lambda_min, lambda_max=threshold)
    poles = pencil_poles(params, q, window, tol)
    LOG.info("pencil: %d m_0 poles in [%g, %g], threshold %g", len(poles), window.lambda_min, window.lambda_max, threshold)
    if len(poles) < 2:
        return []
    t_min = math.log(choose_delta(window.lambda_min, q, tol))
    pairs = list(zip(poles[:-1], poles[1:]))

    def solve(pair: tuple[EigenvalueRecord, EigenvalueRecord]) -> tuple[float, KernelCertificate]:
        return _root_between(params, q, N, geometry, pair[0], pair[1], t_min, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            roots = list(pool.map(solve, pairs))
    else:
        roots = [solve(pair) for pair in pairs]
    for lam, certificate in roots:
        if certificate.residual > 1e-6:
            LOG.warning("pencil root %.17g has kernel residual %.2e", lam, certificate.residual)
    return sorted(roots, key=lambda item: item[0])


def truncation_drift(
    params: BoundaryParams,
    q: RadialPotential,
    window: SpectrumWindow,
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[tuple[float, float, float]]:
    """(root at N, root at 2N, relative drift) for every pencil root in the window."""
    coarse = pencil_negative_eigenvalues(params, q, window, N, geometry, tol)
    fine = pencil_negative_eigenvalues(params, q, window, 2 * N, geometry, tol)
    rows = []
    for (lam_n, _), (lam_2n, _) in zip(coarse, fine):
        drift = abs(lam_2n - lam_n) / abs(lam_2n)
        if drift > DRIFT_WARN:
            LOG.warning("pencil root %.6e drifts by %.2e from N=%d to N=%d", lam_n, drift, N, 2 * N)
        rows.append((lam_n, lam_2n, drift))
    return rows


# --- sweeps ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    lam: float
    E: float
    min_eig: float
    N: int


@dataclass(frozen=True)
class HerglotzRow:
    lam: complex
    E: complex

    @property
    def sign(self) -> float:
        return self.E.imag * self.lam.imag


def pencil_sweep(
    params: BoundaryParams,
    q: RadialPotential,
    lams: Sequence[float],
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> list[SweepRow]:
    def evaluate(lam: float) -> SweepRow:
        try:
            piece = assemble_slice(lam, params, q, N, geometry, tol)
            return SweepRow(lam, float(np.real(piece.scalar_reduction())), piece.min_eigenvalue(), N)
        except PoleAtLambda as exc:
            LOG.info("sweep point %g skipped: %s", lam, exc)
            return SweepRow(lam, math.nan, math.nan, N)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, lams))
    else:
        rows = [evaluate(lam) for lam in lams]
    return sorted(rows, key=lambda row: row.lam)


def herglotz_samples(
    params: BoundaryParams,
    q: RadialPotential,
    lams: Sequence[complex],
    N: int,
    geometry: PencilGeometry = PencilGeometry(),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[HerglotzRow]:
    rows = []
    for lam in lams:
        lam = complex(lam)
        if lam.imag == 0.0:
            raise ValueError("Herglotz samples need non-real lambda")
        rows.append(HerglotzRow(lam, complex(scalar_reduction_E(lam, params, q, N, geometry, tol))))
    return rows
