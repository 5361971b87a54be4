from __future__ import annotations

import math
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, model_validator


class BoundaryParams(BaseModel):
    """Slope b > 0 of the singular Robin coefficient and the point condition beta."""

    model_config = ConfigDict(frozen=True)

    b: float = Field(gt=0)
    beta: float = 0.0

    @model_validator(mode="after")
    def _finite(self) -> "BoundaryParams":
        if not (math.isfinite(self.b) and math.isfinite(self.beta)):
            raise ValueError("b and beta must be finite")
        return self

    @property
    def atan_beta(self) -> float:
        return math.atan(self.beta)


class SpectrumWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_min: float
    lambda_max: float
    modes: list[int] | None = None

    @model_validator(mode="after")
    def _ordered(self) -> "SpectrumWindow":
        if not (math.isfinite(self.lambda_min) and math.isfinite(self.lambda_max)):
            raise ValueError("window bounds must be finite")
        if self.lambda_min >= self.lambda_max:
            raise ValueError("lambda_min must be smaller than lambda_max")
        return self


@dataclass(frozen=True)
class EigenvalueRecord:
    mode: int
    index: int
    lam: float
    shoot_residual: float
    bracket_residual: float
    branch: int


@dataclass(frozen=True)
class MFunctionSample:
    mode: int
    lam: complex
    value: complex
