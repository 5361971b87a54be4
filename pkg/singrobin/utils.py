from __future__ import annotations

import math

BRANCH_SLACK = 1e-9


def principal_angle(value: float) -> float:
    """Reduce an angle modulo pi into (-pi/2, pi/2]."""
    reduced = value - math.pi * math.floor(value / math.pi + 0.5)
    if reduced <= -math.pi / 2:
        reduced += math.pi
    return reduced


def arccot(x: float) -> float:
    # branch (0, pi), continuous in x
    if x == 0.0:
        return math.pi / 2
    angle = math.atan(1.0 / x)
    return angle if x > 0 else angle + math.pi


def floor_branch(phase: float) -> int:
    return math.floor(phase / math.pi + BRANCH_SLACK)


def ceil_branch(phase: float) -> int:
    return math.ceil(phase / math.pi - BRANCH_SLACK)


def format_float(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def safe_exp(log_value: float) -> float:
    if log_value > 709.0:
        return math.inf
    return math.exp(log_value)
