# Global imports
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from phonon_diffusion.kernel.parameters_kernel import DEFAULT_QUAD_TOL
from phonon_diffusion.limit.kinetic_sim import Scheme, SimConfig
from phonon_diffusion.limit.symbols import ALPHA


class ConfigFileError(RuntimeError):
    """A key=value configuration file cannot be read or parsed."""


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseModel):
    """Flat experiment configuration shared by every subcommand."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(256, description="Wave-number grid size (even, >= 16)")
    quad_tol: float = Field(DEFAULT_QUAD_TOL, description="Absolute quadrature tolerance")
    workers: int = Field(1, ge=1, description="Worker threads for rows, modes and eps values")
    out: str = Field("results", description="Output directory")
    cache_dir: Optional[str] = Field(None, description="Kernel cache directory")
    force: bool = Field(False, description="Rebuild the kernel even if cached")

    eps: List[float] = Field(default_factory=lambda: [0.1])
    p: float = Field(1.0, ge=0.0, description="Laplace variable for symbol sweeps")
    xi: List[float] = Field(default_factory=lambda: [1.0])
    scan_bound: float = Field(4.0, description="Upper corner K of the (p, xi) scan lattice")

    alpha: float = ALPHA
    T_bar: float = 1.0
    box_length: float = 64.0
    modes: int = 64
    t_end: float = 1.0
    steps: int = Field(2000, ge=1)
    scheme: str = Field("crank_nicolson", pattern=r"^(crank_nicolson|implicit_euler)$")
    initial_width: float = 4.0
    record_every: int = Field(100, ge=1)
    enforce_dissipation: bool = False

    verify_n: List[int] = Field(default_factory=lambda: [400, 800])
    verify_eps: List[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05])
    only: List[str] = Field(default_factory=list)

    @field_validator("eps", "xi", "verify_n", "verify_eps", "only", mode="before")
    @classmethod
    def parse_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator(
        "quad_tol", "scan_bound", "alpha", "T_bar", "box_length", "t_end", "initial_width"
    )
    @classmethod
    def positive_finite(cls, value: float) -> float:
        if not (math.isfinite(value) and value > 0.0):
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @field_validator("eps", "verify_eps")
    @classmethod
    def positive_eps(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("at least one eps value is required")
        for value in values:
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"eps values must be positive and finite, got {value}")
        return values

    @field_validator("xi")
    @classmethod
    def finite_xi(cls, values: List[float]) -> List[float]:
        if not values or not all(math.isfinite(value) for value in values):
            raise ValueError("xi values must be finite")
        return values

    @model_validator(mode="after")
    def check_cross_fields(self) -> "RunConfig":
        for size in [self.n, *self.verify_n]:
            if size < 16 or size % 2:
                raise ValueError(f"grid size must be an even n >= 16, got n={size}")
        if self.modes < 2 or self.modes % 2:
            raise ValueError(f"modes must be an even count >= 2, got {self.modes}")
        if self.record_every > self.steps:
            raise ValueError("record_every cannot exceed steps")
        if max(self.verify_eps) * self.scan_bound > 1.0:
            raise ValueError(
                f"scan lattice needs eps K <= 1, got {max(self.verify_eps) * self.scan_bound}"
            )
        return self

    def sim_config(self, eps: float, n: Optional[int] = None) -> SimConfig:
        return SimConfig(
            eps=eps,
            alpha=self.alpha,
            T_bar=self.T_bar,
            box_length=self.box_length,
            modes=self.modes,
            n=self.n if n is None else n,
            t_end=self.t_end,
            steps=self.steps,
            scheme=Scheme[self.scheme.upper()],
            initial_width=self.initial_width,
            record_every=self.record_every,
            enforce_dissipation=self.enforce_dissipation,
        )

    def inputs(self) -> Dict[str, Any]:
        """Manifest record of the configuration."""
        return self.model_dump()


def read_config_file(path: Path) -> Dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment, blank lines are skipped."""
    values: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as config_file:
            lines = config_file.readlines()
    except OSError as err:
        raise ConfigFileError(f"cannot read config file {path}: {err}") from err
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigFileError(f"{path}:{number}: expected key=value, got {raw.strip()!r}")
        key = key.strip()
        if key in values:
            logging.warning(f"{path}:{number}: '{key}' set twice, last value wins")
        values[key] = value.strip()
    return values


def build_config(
    file_values: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Defaults < config file < command-line overrides (None entries skipped)."""
    merged: Dict[str, Any] = dict(file_values or {})
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return RunConfig(**merged)
