"""JSON run configurations for the command-line tool.

Unknown keys are rejected everywhere, so a misspelt error-rate name fails
loudly instead of silently running with a default.
"""
from __future__ import annotations

import json
import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .channels import (
    ChannelError,
    MeasurementlessParams,
    ResetInstrParams,
    ResetParams,
    ThermalParams,
)
from .experiment import DEFAULT_N_EXPERIMENTS, DEFAULT_N_SHOTS, DEFAULT_ALPHAS
from .otp import OtpScheme


class ConfigError(Exception):
    """A configuration file that cannot be parsed or validated."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ThermalReset(_Strict):
    kind: Literal["thermal"]
    gamma1: Optional[float] = Field(None, ge=0)
    gamma2: Optional[float] = Field(None, ge=0)
    p0: float = Field(1.0, ge=0, le=1)


class InstructionReset(_Strict):
    kind: Literal["reset_instruction"]
    m10: Optional[float] = Field(None, ge=0, le=1)
    m01: Optional[float] = Field(None, ge=0, le=1)
    p_bf: float = Field(0.0, ge=0, le=1)


class MeasurementlessReset(_Strict):
    kind: Literal["measurementless"]
    p_r: Optional[float] = Field(None, ge=0, le=1)


ResetModel = Annotated[Union[ThermalReset, InstructionReset, MeasurementlessReset],
                       Field(discriminator="kind")]

_PARAM_TYPES = {
    "thermal": ThermalParams,
    "reset_instruction": ResetInstrParams,
    "measurementless": MeasurementlessParams,
}


class _RunBase(_Strict):
    reset: ResetModel
    otp: list[Literal["none", "cotp", "qotp"]] = ["none", "cotp", "qotp"]
    victim_axis: Literal["Z", "X"] = "Z"
    attacker_axis: list[Literal["Z", "X"]] = ["Z"]
    alphas: list[float] = list(DEFAULT_ALPHAS)
    n_shots: int = Field(DEFAULT_N_SHOTS, ge=1)
    n_experiments: int = Field(DEFAULT_N_EXPERIMENTS, ge=2)
    master_seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("otp", "attacker_axis", mode="before")
    @classmethod
    def _listify(cls, v):
        return [v] if isinstance(v, str) else v

    @field_validator("otp", "attacker_axis")
    @classmethod
    def _nonempty_unique(cls, v):
        if not v:
            raise ValueError("must list at least one entry")
        if len(set(v)) != len(v):
            raise ValueError("entries must be unique")
        return v

    @property
    def otp_schemes(self) -> list[OtpScheme]:
        return [OtpScheme(k) for k in self.otp]


class SweepConfig(_RunBase):
    otp_mode: Literal["keyed", "averaged"] = "keyed"

    @field_validator("alphas")
    @classmethod
    def _alphas_nonempty(cls, v):
        if not v:
            raise ValueError("alpha list must not be empty")
        return v


class GridAxis(_Strict):
    name: str
    values: list[float] = Field(min_length=1)


class GridSpec(_Strict):
    param1: GridAxis
    param2: Optional[GridAxis] = None


class GridConfig(_RunBase):
    grid: GridSpec

    @field_validator("alphas")
    @classmethod
    def _alphas_cover_endpoints(cls, v):
        if not any(math.isclose(a, 0.0, abs_tol=1e-12) for a in v) or \
                not any(math.isclose(a, math.pi, abs_tol=1e-12) for a in v):
            raise ValueError("SNR needs alpha = 0 and alpha = pi in the alpha list")
        return v


def build_reset(model, overrides: dict | None = None) -> ResetParams:
    """Turn a reset section (plus grid overrides) into library parameters."""
    values = model.model_dump(exclude={"kind"})
    values.update(overrides or {})
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise ConfigError(f"reset.{missing[0]}: required for kind {model.kind!r}")
    try:
        return _PARAM_TYPES[model.kind](**values)
    except ChannelError as exc:
        raise ConfigError(f"reset: {exc}") from None


def grid_base_reset(cfg: GridConfig) -> ResetParams:
    """Base parameters for a grid; parameters swept by the grid default to zero."""
    model = cfg.reset
    swept = {cfg.grid.param1.name} | ({cfg.grid.param2.name} if cfg.grid.param2 else set())
    fields = set(type(model).model_fields) - {"kind"}
    for name in sorted(swept):
        if name not in fields:
            raise ConfigError(f"grid: {name!r} is not a parameter of reset kind {model.kind!r} "
                              f"(choose from {sorted(fields)})")
    if cfg.grid.param2 and cfg.grid.param1.name == cfg.grid.param2.name:
        raise ConfigError("grid: param1 and param2 must differ")
    fill = {k: 0.0 for k in swept}
    if "gamma2" in fill:
        # placeholder that keeps gamma1 <= 2 gamma2 for any fixed gamma1
        fill["gamma2"] = math.inf
    return build_reset(model, fill)


def _locate(text: str, key) -> int | None:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return lineno
    return None


def _format_errors(exc: ValidationError, text: str) -> str:
    lines = []
    for err in exc.errors():
        loc = [p for p in err["loc"] if p not in ("thermal", "reset_instruction", "measurementless")]
        path = ".".join(str(p) for p in loc) or "<root>"
        key = next((p for p in reversed(loc) if isinstance(p, str)), None)
        where = _locate(text, key) if key else None
        prefix = f"line {where}: " if where else ""
        lines.append(f"{prefix}{path}: {err['msg']}")
    return "\n".join(lines)


def parse_config(text: str, model: type[_RunBase]) -> _RunBase:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: invalid JSON ({exc.msg})") from None
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc, text)) from None


def load_config(path, model: type[_RunBase]) -> _RunBase:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), model)
