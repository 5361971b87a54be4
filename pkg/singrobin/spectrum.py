"""Eigenvalues of L0' (n = 0 channel with the beta point condition), of L_n
(n >= 1) and of their direct sum L'.

Both eigen-solvers count with Pruefer phases: the inward L0' phase F(lam)
decreases in lam and meets every multiple of pi exactly once, the outward
L_n angle at r = 1 increases in lam.  Root brackets therefore come from the
branch numbers alone, which certifies completeness inside a window.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Sequence

from scipy.optimize import brentq

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ConvergenceError, WindowTruncated
from .models import BoundaryParams, EigenvalueRecord, SpectrumWindow
from .radial import ModeIndex, RadialPotential, choose_delta, l0_shooting_phase, outward_phase
from .specfun import evaluate_imag_order, gamma_phase
from .utils import ceil_branch, floor_branch

LOG = logging.getLogger("singrobin.spectrum")

SHIFT_CANDIDATES = (0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0)
_MAX_EXPANSIONS = 200


def _t_min(lam_scale: float, q: RadialPotential, tol: Tolerances) -> float:
    return math.log(choose_delta(lam_scale, q, tol))


def _moved(window: SpectrumWindow, offset: float) -> SpectrumWindow:
    return SpectrumWindow(
        lambda_min=window.lambda_min + offset, lambda_max=window.lambda_max + offset, modes=window.modes
    )


def _root_in(g: Callable[[float], float], lo: float, hi: float, tol: Tolerances) -> float:
    """Root of the increasing function g on [lo, hi]."""
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo > 0 or g_hi < 0:
        raise ConvergenceError(f"no sign change on [{lo!r}, {hi!r}] ({g_lo:.3e}, {g_hi:.3e})")
    if hi < 0:
        # roots are near-equally spaced in s = log(-lam)
        s = brentq(
            lambda s: g(-math.exp(s)),
            math.log(-hi),
            math.log(-lo),
            xtol=1e-2 * tol.root_rtol,
            rtol=1e-14,
        )
        return -math.exp(s)
    return brentq(g, lo, hi, xtol=1e-14, rtol=1e-2 * tol.root_rtol)


def _solve_branch(
    phase: Callable[[float], float],
    k: int,
    lo: float,
    hi: float,
    increasing: bool,
    phase_at_zero: float | None,
    tol: Tolerances,
) -> float:
    target = k * math.pi
    sign = 1.0 if increasing else -1.0

    def g(lam: float) -> float:
        return sign * (phase(lam) - target)

    if phase_at_zero is not None and lo < 0.0 < hi:
        g0 = sign * (phase_at_zero - target)
        if abs(g0) <= 1e-3 * tol.shoot_tol:
            return 0.0
        lo, hi = (lo, 0.0) if g0 > 0 else (0.0, hi)
    return _root_in(g, lo, hi, tol)


def _record(mode: int, index: int, lam: float, phase_value: float, k: int) -> EigenvalueRecord:
    residual = abs(phase_value - k * math.pi)
    return EigenvalueRecord(
        mode=mode,
        index=index,
        lam=lam,
        shoot_residual=residual,
        bracket_residual=abs(math.sin(phase_value)),
        branch=k,
    )


def _check_residual(record: EigenvalueRecord, tol: Tolerances) -> None:
    if record.shoot_residual > tol.shoot_tol:
        LOG.warning(
            "mode %d eigenvalue %.17g has shooting residual %.2e above %.1e",
            record.mode, record.lam, record.shoot_residual, tol.shoot_tol,
        )


def l0_branch_at_zero(params: BoundaryParams, q: RadialPotential, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """k0 such that the L0' eigenvalue on branch k carries index k0 - k."""
    phase0 = l0_shooting_phase(params, 0.0, q, _t_min(0.0, q, tol), tol=tol)
    return floor_branch(phase0)


def eigenvalues_L0prime(
    params: BoundaryParams,
    q: RadialPotential,
    window: SpectrumWindow,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[EigenvalueRecord]:
    c = q.constant_value
    if c:
        # q = c moves every branch by exactly c
        base = eigenvalues_L0prime(params, RadialPotential.zero(), _moved(window, -c), tol)
        k0 = l0_branch_at_zero(params, q, tol)
        return [replace(r, lam=r.lam + c, index=k0 - r.branch) for r in base]
    lo, hi = window.lambda_min, window.lambda_max
    t_min = _t_min(max(abs(lo), abs(hi)), q, tol)

    def phase(lam: float) -> float:
        return l0_shooting_phase(params, lam, q, t_min, tol=tol)

    phase_lo, phase_hi = phase(lo), phase(hi)
    for edge, value in ((lo, phase_lo), (hi, phase_hi)):
        nearest = round(value / math.pi)
        if abs(value - nearest * math.pi) <= tol.shoot_tol:
            raise WindowTruncated(f"an L0' eigenvalue sits on the window edge {edge!r}; widen the window")
    phase0 = phase(0.0) if lo < 0.0 < hi else None
    k0 = l0_branch_at_zero(params, q, tol)
    first, last = ceil_branch(phase_hi), floor_branch(phase_lo)
    LOG.info("L0' window [%g, %g]: %d eigenvalues", lo, hi, max(0, last - first + 1))

    records: list[EigenvalueRecord] = []
    upper = hi
    for k in range(first, last + 1):
        lam = _solve_branch(phase, k, lo, upper, False, phase0, tol)
        record = _record(0, k0 - k, lam, phase(lam) if lam != 0.0 or phase0 is None else phase0, k)
        _check_residual(record, tol)
        records.append(record)
        upper = lam
    return sorted(records, key=lambda r: r.lam)


def eigenvalues_Ln(
    n: int,
    q: RadialPotential,
    window: SpectrumWindow,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[EigenvalueRecord]:
    if n < 1:
        raise ValueError("eigenvalues_Ln needs n >= 1")
    c = q.constant_value
    if c:
        base = eigenvalues_Ln(n, RadialPotential.zero(), _moved(window, -c), tol)
        return [replace(r, lam=r.lam + c) for r in base]
    mode = ModeIndex.for_mode(n, 1.0)
    lo, hi = window.lambda_min, window.lambda_max
    t_min = _t_min(max(abs(lo), abs(hi)), q, tol)

    def phase(lam: float) -> float:
        return outward_phase(mode, lam, q, tol=tol, t_min=t_min)

    phase_lo, phase_hi = phase(lo), phase(hi)
    for edge, value in ((lo, phase_lo), (hi, phase_hi)):
        nearest = round(value / math.pi)
        if nearest >= 1 and abs(value - nearest * math.pi) <= tol.shoot_tol:
            raise WindowTruncated(f"an L_{n} eigenvalue sits on the window edge {edge!r}; widen the window")
    phase0 = phase(0.0) if lo < 0.0 < hi else None
    first, last = max(1, ceil_branch(phase_lo)), floor_branch(phase_hi)

    records: list[EigenvalueRecord] = []
    lower = lo
    for k in range(first, last + 1):
        lam = _solve_branch(phase, k, lower, hi, True, phase0, tol)
        record = _record(n, k - 1, lam, phase(lam), k)
        _check_residual(record, tol)
        records.append(record)
        lower = lam
    return records


def required_mode_cutoff(q: RadialPotential, lambda_max: float) -> int:
    """Largest n whose channel can hold an eigenvalue below lambda_max (L_n > n^2 + inf q)."""
    room = lambda_max - q.infimum
    if room <= 1.0:
        return 0
    return math.ceil(math.sqrt(room)) - 1


def count_between(
    params: BoundaryParams,
    q: RadialPotential,
    a: float,
    b: float,
    n_modes: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> int:
    """Number of eigenvalues of L' in [a, b)."""
    if a >= b:
        return 0
    t_min = _t_min(max(abs(a), abs(b)), q, tol)
    total = floor_branch(l0_shooting_phase(params, a, q, t_min, tol=tol)) - floor_branch(
        l0_shooting_phase(params, b, q, t_min, tol=tol)
    )
    cutoff = required_mode_cutoff(q, b) if n_modes is None else n_modes
    for n in range(1, cutoff + 1):
        mode = ModeIndex.for_mode(n, params.b)
        total += ceil_branch(outward_phase(mode, b, q, tol=tol, t_min=t_min)) - ceil_branch(
            outward_phase(mode, a, q, tol=tol, t_min=t_min)
        )
    return total


def assemble_spectrum_Lprime(
    params: BoundaryParams,
    q: RadialPotential,
    window: SpectrumWindow,
    mode_cutoff: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> list[EigenvalueRecord]:
    needed = required_mode_cutoff(q, window.lambda_max)
    if mode_cutoff is None:
        mode_cutoff = needed
    elif mode_cutoff < needed:
        LOG.warning("mode cutoff %d below the certified %d; spectrum may be incomplete", mode_cutoff, needed)
    modes = window.modes if window.modes is not None else list(range(mode_cutoff + 1))

    def solve(n: int) -> list[EigenvalueRecord]:
        if n == 0:
            return eigenvalues_L0prime(params, q, window, tol)
        return eigenvalues_Ln(n, q, window, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(solve, modes))
    else:
        chunks = [solve(n) for n in modes]

    merged = sorted((r for chunk in chunks for r in chunk), key=lambda r: (r.lam, r.mode))
    cutoff = max(modes) if modes else 0
    top = min(window.lambda_max, 0.0)
    above = count_between(params, q, top, 0.0, cutoff, tol) if top < 0.0 else 0
    bottom = max(window.lambda_min, 0.0)
    below = count_between(params, q, 0.0, bottom, cutoff, tol) if bottom > 0.0 else 0

    negatives = [r for r in merged if r.lam < 0.0]
    nonnegatives = [r for r in merged if r.lam >= 0.0]
    labelled = [replace(r, index=-(above + i + 1)) for i, r in enumerate(reversed(negatives))]
    labelled.reverse()
    labelled += [replace(r, index=below + i) for i, r in enumerate(nonnegatives)]
    return labelled


def counting_function(records: Sequence[EigenvalueRecord], lam: float) -> int:
    return sum(1 for r in records if r.lam <= lam)


def hausdorff_distance(first: Sequence[float], second: Sequence[float]) -> float:
    if not first or not second:
        return math.inf if (first or second) else 0.0
    forward = max(min(abs(a - b) for b in second) for a in first)
    backward = max(min(abs(a - b) for a in first) for b in second)
    return max(forward, backward)


def resolvent_shift_if_needed(
    params: BoundaryParams,
    q: RadialPotential,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[RadialPotential, float]:
    """Shift q by the smallest candidate constant that keeps 0 away from sigma(L')."""
    margin = tol.shift_margin

    def clear(potential: RadialPotential) -> bool:
        return count_between(params, potential, -margin, margin, tol=tol) == 0

    if clear(q):
        return q, 0.0
    for c in SHIFT_CANDIDATES:
        shifted = q.shifted(c)
        if clear(shifted):
            LOG.info("0 lies within %.1e of the spectrum; shifting q by %g", margin, c)
            return shifted, c
    raise ConvergenceError("no candidate shift clears 0 from the spectrum")


# --- index-addressed eigenvalues --------------------------------------------------


def eigenvalue_by_branch(
    params: BoundaryParams,
    q: RadialPotential,
    k: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """Negative lam with F(lam) = k pi; returns (lam, F(lam))."""
    target = k * math.pi
    b = params.b
    floor = math.log(max(1.0, q.sup_norm + 1.0))

    def phase_at(s: float, t_min: float) -> float:
        return l0_shooting_phase(params, -math.exp(s), q, t_min, tol=tol)

    def phase_s(s: float) -> float:
        return phase_at(s, _t_min(math.exp(s), q, tol))

    s_hi = floor
    value = phase_s(s_hi)
    if value > target:
        # the branch root lies in (-e^floor, 0): F(0) < k pi for every negative branch
        t_min = _t_min(math.exp(floor), q, tol)

        def shallow(lam: float) -> float:
            return l0_shooting_phase(params, lam, q, t_min, tol=tol)

        lam = _root_in(lambda lam: target - shallow(lam), -math.exp(floor), 0.0, tol)
        return lam, shallow(lam)
    s_lo = s_hi + max(2.0 * b * (target - value), 0.0) + 0.5 * b * math.pi
    for _ in range(_MAX_EXPANSIONS):
        value_lo = phase_s(s_lo)
        if value_lo >= target:
            break
        s_hi = s_lo
        s_lo += max(2.0 * b * (target - value_lo), 0.0) + 0.5 * b * math.pi
    else:
        raise ConvergenceError(f"could not bracket branch {k}")

    t_min = _t_min(math.exp(s_lo), q, tol)
    s = brentq(
        lambda s: phase_at(s, t_min) - target,
        s_hi,
        s_lo,
        xtol=1e-2 * tol.root_rtol,
        rtol=1e-14,
    )
    return -math.exp(s), phase_at(s, t_min)


def negative_tail(
    params: BoundaryParams,
    q: RadialPotential,
    count: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    skip: int = 0,
) -> list[EigenvalueRecord]:
    """L0' eigenvalues with indices -(skip+1) .. -(skip+count), most negative first."""
    k0 = l0_branch_at_zero(params, q, tol)
    records = []
    for n in range(-(skip + 1), -(skip + count) - 1, -1):
        k = k0 - n
        lam, phase_value = eigenvalue_by_branch(params, q, k, tol)
        records.append(_record(0, n, lam, phase_value, k))
    return sorted(records, key=lambda r: r.lam)


def eigenvalue_by_index(
    params: BoundaryParams,
    q: RadialPotential,
    n: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> EigenvalueRecord:
    if n >= 0:
        raise ValueError("eigenvalue_by_index addresses negative indices")
    return negative_tail(params, q, 1, tol, skip=-n - 1)[0]


def bessel_bracket_oracle(params: BoundaryParams, lam: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Normalized beta-bracket of the q = 0 solution Im(Z(kappa) conj Z(kappa r)), Z of order i/b.

    Zero exactly at eigenvalues of L0' with q = 0; Z = I for lam < 0, J for lam > 0.
    """
    if lam == 0.0:
        raise ValueError("the Bessel oracle is singular at lambda=0")
    nu = 1.0 / params.b
    kappa = math.sqrt(abs(lam))
    value = evaluate_imag_order("I" if lam < 0 else "J", params.b, kappa, tol=tol).value
    modulus = math.sqrt(math.pi * nu / math.sinh(math.pi * nu))
    c = value / modulus
    psi1 = nu * math.log(kappa / 2.0) - gamma_phase(params.b)
    alpha = -c.imag * math.sin(psi1) - c.real * math.cos(psi1)
    gamma = c.imag * math.cos(psi1) - c.real * math.sin(psi1)
    return (gamma - alpha * params.beta) / (math.hypot(alpha, gamma) * math.sqrt(1.0 + params.beta**2))
