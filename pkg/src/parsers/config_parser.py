"""
src/parsers/config_parser.py

Reads run configurations (TOML, or a JSON report re-ingested) into strict
pydantic models. Misspelled keys are rejected. SI input is converted to the
normalized units (omega_b = 1) used everywhere else.
"""

import json
import math
import tomllib
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.errors import ConfigError, SchemaError
from src.core.params import RATE_FIELDS, SqueezingParams, SystemParams
from src.core.spectrum import thermal_occupancy
from src.core.steady_state import DriveConfig
from src.core.sweep import SweepSpec

DEFAULT_OMEGA_GRID = (-3.0, 3.0, 1201)
DEFAULT_PRECISION = 12

COMMANDS = ("spectrum", "cool", "steady", "sweep", "optimize")
REQUIRED_BLOCKS = {
    "spectrum": ("system",),
    "cool": ("system",),
    "steady": ("system", "drive"),
    "sweep": ("system", "sweep"),
    "optimize": ("system",),
}
ALLOWED_BLOCKS = {
    "spectrum": {"system", "squeezing", "drive", "spectrum", "output"},
    "cool": {"system", "squeezing", "drive", "output"},
    "steady": {"system", "drive", "output"},
    "sweep": {"system", "squeezing", "sweep", "output"},
    "optimize": {"system", "optimize", "output"},
}
OPTIONAL_BLOCKS = ("drive", "squeezing", "sweep", "spectrum", "optimize")


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemBlock(StrictModel):
    omega_b: Optional[float] = Field(default=None, gt=0)
    delta_a: float
    delta_m: float
    gamma_a: float = Field(gt=0)
    gamma_b: float = Field(gt=0)
    gamma_m: float = Field(gt=0)
    g: float = Field(ge=0)
    G_mag: float = Field(ge=0)
    n_a: Optional[float] = Field(default=None, ge=0)
    n_b: Optional[float] = Field(default=None, ge=0)
    n_m: Optional[float] = Field(default=None, ge=0)


class DriveBlock(StrictModel):
    e_abs: float = Field(ge=0)
    theta: float = 0.0
    g0: float = Field(ge=0)
    xi: float = Field(ge=0)
    mode: Literal["approximate", "self_consistent"] = "approximate"


class SqueezingBlock(StrictModel):
    mode: Literal["none", "analytic_optimal", "numeric_optimal", "fixed", "drive"] = "none"
    zeta_abs: Optional[float] = Field(default=None, ge=0)
    phi: Optional[float] = None

    @model_validator(mode="after")
    def _explicit_values(self):
        explicit = self.zeta_abs is not None or self.phi is not None
        if self.mode == "fixed" and (self.zeta_abs is None or self.phi is None):
            raise ValueError("mode 'fixed' needs both zeta_abs and phi")
        if self.mode != "fixed" and explicit:
            raise ValueError(f"zeta_abs/phi are only accepted with mode 'fixed', not {self.mode!r}")
        return self


class SweepBlock(StrictModel):
    variable: str
    metrics: List[str]
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    points: Optional[int] = Field(default=None, ge=1)
    spacing: Literal["linear", "log"] = "linear"
    label: str = ""
    rate: Literal["number", "amplitude"] = "number"

    @model_validator(mode="after")
    def _one_grid(self):
        ranged = (self.start, self.stop, self.points)
        if self.values is not None and any(v is not None for v in ranged):
            raise ValueError("give either values or start/stop/points, not both")
        if self.values is None and any(v is None for v in ranged):
            raise ValueError("grid needs values or all of start, stop, points")
        return self

    def grid(self) -> Tuple[float, ...]:
        if self.values is not None:
            return tuple(self.values)
        if self.spacing == "log":
            return tuple(np.geomspace(self.start, self.stop, self.points))
        return tuple(np.linspace(self.start, self.stop, self.points))


class SpectrumBlock(StrictModel):
    omega_min: float = DEFAULT_OMEGA_GRID[0]
    omega_max: float = DEFAULT_OMEGA_GRID[1]
    points: int = Field(default=DEFAULT_OMEGA_GRID[2], ge=1)


class OptimizeBlock(StrictModel):
    objective: Literal["stokes", "n_st"] = "stokes"
    zeta_points: int = Field(default=101, ge=2)
    phi_points: int = Field(default=64, ge=2)
    rate: Literal["number", "amplitude"] = "number"


class OutputBlock(StrictModel):
    path: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None
    precision: int = Field(default=DEFAULT_PRECISION, ge=1, le=17)


class RunConfig(StrictModel):
    command: Optional[Literal["spectrum", "cool", "steady", "sweep", "optimize"]] = None
    units: Literal["normalized", "si"] = "normalized"
    omega_b_hz: Optional[float] = Field(default=None, gt=0)
    temperature_k: Optional[float] = Field(default=None, ge=0)
    cavity_frequency_hz: Optional[float] = Field(default=None, gt=0)
    magnon_frequency_hz: Optional[float] = Field(default=None, gt=0)
    system: SystemBlock
    drive: Optional[DriveBlock] = None
    squeezing: Optional[SqueezingBlock] = None
    sweep: Optional[SweepBlock] = None
    spectrum: Optional[SpectrumBlock] = None
    optimize: Optional[OptimizeBlock] = None
    output: OutputBlock = Field(default_factory=OutputBlock)

    @model_validator(mode="after")
    def _units(self):
        if self.units == "si":
            if self.omega_b_hz is None:
                raise ValueError("units = 'si' needs omega_b_hz")
            if self.system.omega_b is not None:
                raise ValueError("with units = 'si' the mechanical frequency comes from omega_b_hz, drop system.omega_b")
        elif any(v is not None for v in (self.omega_b_hz, self.temperature_k, self.cavity_frequency_hz,
                                          self.magnon_frequency_hz)):
            raise ValueError("omega_b_hz / temperature_k / *_frequency_hz only apply with units = 'si'")
        if self.squeezing is not None and self.squeezing.mode == "drive" and self.drive is None:
            raise ValueError("squeezing mode 'drive' needs a [drive] block")
        return self

    # ------------------------------------------------------------------
    def check_command(self, command: str) -> None:
        if command not in COMMANDS:
            raise SchemaError(f"command {command!r} does not take a config")
        if self.command is not None and self.command != command:
            raise SchemaError(f"config was written for {self.command!r}, not {command!r}")
        present = {"system", "output"} | {name for name in OPTIONAL_BLOCKS if getattr(self, name) is not None}
        missing = [b for b in REQUIRED_BLOCKS[command] if b not in present]
        if missing:
            raise SchemaError(f"command {command!r} needs block(s) {missing}")
        extra = sorted(present - ALLOWED_BLOCKS[command])
        if extra:
            raise SchemaError(f"block(s) {extra} do not belong to command {command!r}")

    def _occupancy(self, name: str, frequency_hz: Optional[float]) -> float:
        value = getattr(self.system, name)
        if value is not None:
            return value
        if self.temperature_k is not None and frequency_hz is not None:
            return thermal_occupancy(2.0 * math.pi * frequency_hz, self.temperature_k)
        raise ConfigError(f"system.{name}: occupancy missing (give it, or temperature_k with the mode frequency)")

    def normalized(self) -> "RunConfig":
        """Same configuration expressed in normalized units (omega_b = 1 when SI)."""
        if self.units == "normalized":
            for name in ("n_a", "n_b", "n_m"):
                if getattr(self.system, name) is None:
                    raise ConfigError(f"system.{name}: occupancy missing")
            system = self.system.model_copy(update={"omega_b": self.system.omega_b or 1.0})
            return self.model_copy(update={"system": system})

        scale = self.omega_b_hz
        system_values = {
            name: getattr(self.system, name) / scale
            for name in RATE_FIELDS if name != "omega_b"
        }
        system_values.update(
            omega_b=1.0,
            n_a=self._occupancy("n_a", self.cavity_frequency_hz),
            n_b=self._occupancy("n_b", self.omega_b_hz),
            n_m=self._occupancy("n_m", self.magnon_frequency_hz),
        )
        update: Dict[str, object] = {
            "units": "normalized", "omega_b_hz": None, "temperature_k": None,
            "cavity_frequency_hz": None, "magnon_frequency_hz": None,
            "system": SystemBlock(**system_values),
        }
        if self.drive is not None:
            update["drive"] = self.drive.model_copy(update={
                "e_abs": self.drive.e_abs / scale, "g0": self.drive.g0 / scale, "xi": self.drive.xi / scale,
            })
        if self.squeezing is not None and self.squeezing.zeta_abs is not None:
            update["squeezing"] = self.squeezing.model_copy(update={"zeta_abs": self.squeezing.zeta_abs / scale})
        if self.spectrum is not None:
            update["spectrum"] = self.spectrum.model_copy(update={
                "omega_min": self.spectrum.omega_min / scale, "omega_max": self.spectrum.omega_max / scale,
            })
        if self.sweep is not None and self.sweep.variable in RATE_FIELDS + ("zeta_abs", "omega"):
            update["sweep"] = self.sweep.model_copy(update={
                "values": None if self.sweep.values is None else [v / scale for v in self.sweep.values],
                "start": None if self.sweep.start is None else self.sweep.start / scale,
                "stop": None if self.sweep.stop is None else self.sweep.stop / scale,
            })
        logger.debug(f"Converted SI config with omega_b/2pi-normalization {scale:.6g} Hz")
        return self.model_copy(update=update)

    # ------------------------------------------------------------------
    def system_params(self) -> SystemParams:
        s = self.normalized().system
        return SystemParams(
            omega_b=s.omega_b, delta_a=s.delta_a, delta_m=s.delta_m, gamma_a=s.gamma_a, gamma_b=s.gamma_b,
            gamma_m=s.gamma_m, g=s.g, G_mag=s.G_mag, n_a=s.n_a, n_b=s.n_b, n_m=s.n_m,
        )

    def squeezing_mode(self) -> str:
        return "none" if self.squeezing is None else self.squeezing.mode

    def fixed_squeezing(self) -> Optional[SqueezingParams]:
        sq = self.normalized().squeezing
        if sq is None or sq.mode != "fixed":
            return None
        return SqueezingParams(sq.zeta_abs, sq.phi)

    def drive_config(self) -> Optional[DriveConfig]:
        cfg = self.normalized()
        if cfg.drive is None:
            return None
        d = cfg.drive
        return DriveConfig(system=self.system_params(), e_abs=d.e_abs, theta=d.theta, g0=d.g0, xi=d.xi)

    def omega_grid(self) -> np.ndarray:
        block = self.normalized().spectrum or SpectrumBlock()
        return np.linspace(block.omega_min, block.omega_max, block.points)

    def sweep_spec(self) -> SweepSpec:
        cfg = self.normalized()
        if cfg.sweep is None:
            raise SchemaError("no [sweep] block")
        mode = self.squeezing_mode()
        if mode == "drive":
            raise SchemaError("squeezing mode 'drive' is not available for sweeps")
        return SweepSpec(
            variable=cfg.sweep.variable,
            grid=cfg.sweep.grid(),
            fixed=self.system_params(),
            metrics=tuple(cfg.sweep.metrics),
            squeezing_mode=mode,
            squeezing=self.fixed_squeezing(),
            label=cfg.sweep.label,
            rate=cfg.sweep.rate,
        )

    def echo(self, command: str) -> Dict[str, object]:
        """Fully resolved normalized configuration, loadable again with --config."""
        cfg = self.normalized()
        data = cfg.model_dump(mode="json", exclude_none=True)
        data["command"] = command
        data.pop("units", None)
        return data


class ConfigParser:

    @staticmethod
    def _describe(error: ValidationError) -> str:
        lines = []
        for item in error.errors():
            location = ".".join(str(part) for part in item["loc"]) or "<root>"
            lines.append(f"{location}: {item['msg']}")
        return "; ".join(lines)

    @classmethod
    def parse_content(cls, content: str, suffix: str = ".toml") -> RunConfig:
        try:
            if suffix.lower() == ".json":
                raw = json.loads(content)
                # a written report carries its own resolved config
                if isinstance(raw, dict) and "config" in raw and "result" in raw:
                    raw = raw["config"]
            else:
                raw = tomllib.loads(content)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"TOML syntax error: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON syntax error at line {e.lineno} column {e.colno}: {e.msg}") from e

        try:
            return RunConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(f"invalid config: {cls._describe(e)}") from e

    @classmethod
    def parse_file(cls, file_path: str) -> RunConfig:
        path = Path(file_path)
        try:
            content = path.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Failed to read config {file_path}: {e}")
            raise ConfigError(f"cannot read config {file_path}: {e}") from e
        config = cls.parse_content(content, path.suffix)
        logger.info(f"Loaded config {path.name} ({config.units} units)")
        return config
