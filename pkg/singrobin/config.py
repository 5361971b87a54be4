from __future__ import annotations

import math
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    ode_rtol: float = Field(1e-11, gt=0)
    ode_atol: float = Field(1e-13, gt=0)
    pole_tol: float = Field(1e-8, gt=0)
    shoot_tol: float = Field(1e-8, gt=0)
    root_rtol: float = Field(1e-10, gt=0)
    quad_atol: float = Field(1e-12, gt=0)
    delta_max: float = Field(1e-3, gt=0, le=0.1)
    delta_perturbation: float = Field(1e-10, gt=0)
    x_switch: float = Field(8.0, gt=0)
    cancellation_warn: float = Field(1e-6, gt=0)
    shift_margin: float = Field(1e-3, gt=0)
    checkpoints: int = Field(200, ge=200)
    stiff_rate: float = Field(400.0, gt=0)
    theta0_richardson: float = Field(1e-6, gt=0)
    branch_tol: float = Field(0.25, gt=0)


DEFAULT_TOLERANCES = Tolerances()


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # only a recover run on a tail file may leave b unset
    b: float | None = Field(None, gt=0)
    beta: float = 0.0
    q: str = "zero"
    lambda_min: float = -1e6
    lambda_max: float = 50.0
    truncation: int = Field(60, ge=1, le=200)
    mode_cutoff: int | None = Field(None, ge=0)
    outer_radius: float = Field(2.0, gt=1)
    workers: int = Field(1, ge=1)
    n_tail: int = Field(8, ge=1)
    tail: str | None = None
    pseudo_modes: bool = False
    check_truncation: bool = False
    complex_sweep: bool = False
    sweep_points: int = Field(41, ge=2)
    output_dir: str = "out"
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def _check_finite(self) -> "RunConfig":
        for name in ("b", "beta", "lambda_min", "lambda_max"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.lambda_min >= self.lambda_max:
            raise ValueError("lambda_min must be smaller than lambda_max")
        return self


class EnvConfig(BaseModel):
    config_path: str | None = None
    log_level: str = "INFO"


class SettingsError(RuntimeError):
    pass


def _nest(flat: dict[str, Any]) -> dict[str, Any]:
    # "tolerances.ode_rtol=1e-10" style keys become nested sections
    out: dict[str, Any] = {}
    for key, value in flat.items():
        if value is None:
            continue
        key = key.strip().replace("-", "_")
        if "." in key:
            section, field = key.split(".", 1)
            out.setdefault(section, {})[field] = value
        else:
            out[key] = value
    return out


def read_config_file(path: str | Path) -> dict[str, Any]:
    config_path = Path(path)
    if not config_path.exists():
        raise SettingsError(f"Config file not found: {config_path}")
    if config_path.suffix in {".yaml", ".yml"}:
        data = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise SettingsError(f"Config file must hold a mapping: {config_path}")
        return data
    from dotenv import dotenv_values

    return _nest(dict(dotenv_values(config_path)))


def build_run_config(file_data: dict[str, Any], overrides: dict[str, Any]) -> RunConfig:
    data = dict(file_data)
    tolerances = dict(data.get("tolerances") or {})
    tolerances.update(overrides.get("tolerances") or {})
    data.update({k: v for k, v in overrides.items() if k != "tolerances" and v is not None})
    if tolerances:
        data["tolerances"] = tolerances
    if data.get("b") is None and not data.get("tail"):
        raise SettingsError("Invalid config: missing required parameter 'b' (--b)")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise SettingsError(f"Invalid config: {exc}") from exc


def load_settings(path: str | None, overrides: dict[str, Any] | None = None) -> RunConfig:
    file_data = read_config_file(path) if path else {}
    return build_run_config(file_data, overrides or {})


def load_env() -> EnvConfig:
    from dotenv import load_dotenv

    load_dotenv()
    import os

    return EnvConfig(
        config_path=os.getenv("SINGROBIN_CONFIG"),
        log_level=os.getenv("SINGROBIN_LOG_LEVEL", "INFO"),
    )
