"""JSON simulation config, validated with pydantic."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sbpsat.diagnostics import ReceiverSpec
from sbpsat.domain import HomogeneousMedia, MediaRaster, read_raster
from sbpsat.errors import ConfigurationError
from sbpsat.timestepper import CFL_SAFETY, SourceSpec


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RegionConfig(_Strict):
    Lx: float = Field(gt=0)
    Ly: float = Field(gt=0)
    h: float = Field(gt=0)


class HomogeneousConfig(_Strict):
    rho: float = Field(gt=0)
    cp: float = Field(gt=0)
    cs: float = Field(ge=0)


class MediaConfig(_Strict):
    homogeneous: Optional[HomogeneousConfig] = None
    raster: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.homogeneous is None) == (self.raster is None):
            raise ValueError("give exactly one of 'homogeneous' or 'raster'")
        return self


class TimeConfig(_Strict):
    dt: float = Field(gt=0)
    t_end: float = Field(ge=0)


class SourceConfig(_Strict):
    x: float
    y: float
    f0: float = Field(gt=0)
    t0: float
    amplitude: float = 1.0
    width: float = Field(default=0.0, ge=0)


class ReceiverConfig(_Strict):
    x: float
    y: float
    component: Literal["vx", "vy", "sxx", "sxy", "syy"] = "vy"


class OutputConfig(_Strict):
    dir: str = "output"
    decimation: int = Field(default=1, ge=1)


class ToggleConfig(_Strict):
    free_surface_sats: bool = True
    interface_sats: bool = True


class SimulationConfig(_Strict):
    regions: list[RegionConfig] = Field(min_length=1)
    media: MediaConfig
    time: TimeConfig
    source: Optional[SourceConfig] = None
    receivers: list[ReceiverConfig] = Field(default_factory=list)
    outputs: OutputConfig = OutputConfig()
    mode: Literal["leapfrog", "rk4"] = "leapfrog"
    toggles: ToggleConfig = ToggleConfig()
    initial: Literal["zero", "random"] = "zero"
    y_bottom: float = 0.0
    cfl_safety: float = Field(default=CFL_SAFETY, gt=0)

    # directory that relative paths in the config refer to
    base_dir: Path = Path(".")

    def region_sizes(self) -> list[tuple[float, float, float]]:
        return [(r.Lx, r.Ly, r.h) for r in self.regions]

    def load_media(self) -> HomogeneousMedia | MediaRaster:
        if self.media.homogeneous is not None:
            m = self.media.homogeneous
            return HomogeneousMedia(rho=m.rho, cp=m.cp, cs=m.cs)
        path = Path(self.media.raster)
        if not path.is_absolute():
            path = self.base_dir / path
        try:
            return read_raster(path)
        except OSError as exc:
            raise ConfigurationError(f"media.raster: cannot read {path}: {exc}") from exc

    def source_spec(self) -> SourceSpec | None:
        if self.source is None:
            return None
        return SourceSpec(**self.source.model_dump())

    def receiver_specs(self) -> list[ReceiverSpec]:
        return [ReceiverSpec(**r.model_dump()) for r in self.receivers]


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict, base_dir: str | Path = ".") -> SimulationConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    if "base_dir" in data:
        raise ConfigurationError("base_dir: not a config field")
    try:
        return SimulationConfig(**data, base_dir=Path(base_dir))
    except ValidationError as exc:
        raise ConfigurationError(_format_validation(exc)) from None


def load_config(path: str | Path) -> SimulationConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data, path.parent)
