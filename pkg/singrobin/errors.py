from __future__ import annotations


class SingRobinError(RuntimeError):
    pass


class IntegrationError(SingRobinError):
    def __init__(self, message: str, r: float | None = None) -> None:
        super().__init__(message if r is None else f"{message} (r={r:.6g})")
        self.r = r


class PoleAtLambda(SingRobinError):
    def __init__(self, mode: int, lam: complex) -> None:
        super().__init__(f"lambda={lam!r} is a pole of the m-function of mode {mode}")
        self.mode = mode
        self.lam = lam


class WindowTruncated(SingRobinError):
    pass


class SingularBlock(SingRobinError):
    pass


class NearDirichletEigenvalue(SingRobinError):
    pass


class NonMonotoneTail(SingRobinError):
    pass


class EstimateOutOfBranch(SingRobinError):
    pass


class InsufficientTail(SingRobinError):
    pass


class ConvergenceError(SingRobinError):
    pass


class QuadratureError(SingRobinError):
    def __init__(self, message: str, failed: list[int]) -> None:
        super().__init__(f"{message}: {failed}")
        self.failed = failed


class PotentialFormatError(SingRobinError):
    def __init__(self, message: str, row: int | None = None) -> None:
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row
