# stefanctl/models/run_config.py
import logging
import yaml
from pathlib import Path
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError
from typing import Any, Dict, List, Literal, Optional, Union
from stefanctl.config.settings import settings
from stefanctl.utils.exceptions import ConfigError
from .common import SetpointRelaxation, UnitSystem
from .gains import ControlGains
from .physical import InitialData, PhysicalParams, TabulatedProfile
from .solver import ControllerConfig, QcSchedule, SolverConfig

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# cm-based configs: multiply by these to get SI
CM = 1e-2
CM2 = 1e-4
W_PER_CM_K = 1e2
W_PER_CM2 = 1e4


class OutputConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    directory: Optional[str] = Field(None, description="Run directory; defaults to <out>/<name>")
    snapshot_interval: float = Field(default_factory=lambda: settings.snapshot_interval_s, gt=0)


class AnalysisConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    setpoint_relaxation: SetpointRelaxation = SetpointRelaxation.EPSILON1
    lambda1: float = Field(default_factory=lambda: settings.lambda1, gt=0)
    kappa2_grid: List[float] = Field(default_factory=lambda: list(settings.kappa2_grid), min_length=1)


class RunConfig(BaseModel):
    """One experiment: physics, initial data, gains, solver and controller settings."""
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = "run"
    units: UnitSystem = UnitSystem.SI
    order: Literal[2, 3]
    params: PhysicalParams
    initial: InitialData
    gains: Optional[ControlGains] = None
    solver: SolverConfig
    controller: ControllerConfig = Field(default_factory=ControllerConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)

    def to_si(self) -> "RunConfig":
        """Convert a cm-based config to SI; SI configs are returned unchanged."""
        if self.units == UnitSystem.SI:
            return self
        p = self.params
        params = p.model_copy(update={
            "alpha": p.alpha * CM2,
            "beta": p.beta * CM2,
            "k_cond": p.k_cond * W_PER_CM_K,
            "length": p.length * CM,
        })

        data = self.initial
        profile = data.profile
        if isinstance(profile, TabulatedProfile):
            profile = profile.model_copy(update={"x": [x * CM for x in profile.x]})
        initial = data.model_copy(update={
            "s0": data.s0 * CM,
            "v0": data.v0 * CM,
            "a0": data.a0 * CM if data.a0 is not None else None,
            "profile": profile,
        })

        gains = self.gains
        if gains is not None:
            gains = gains.model_copy(update={"s_r": gains.s_r * CM})

        controller = self.controller
        if controller.schedule is not None:
            schedule = QcSchedule(
                times=list(controller.schedule.times),
                values=[v * W_PER_CM2 for v in controller.schedule.values],
            )
            controller = controller.model_copy(update={"schedule": schedule})

        logger.debug(f"Converted config '{self.name}' from cm to SI")
        return self.model_copy(update={
            "units": UnitSystem.SI,
            "params": params,
            "initial": initial,
            "gains": gains,
            "controller": controller,
        })


def parse_run_config(text: str, source: str = "<string>") -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("CONFIG_SYNTAX", f"Cannot parse {source} as YAML", debug_info=str(exc))
    if not isinstance(raw, dict):
        raise ConfigError("CONFIG_SCHEMA", f"{source} must contain a mapping at the top level")
    return build_run_config(raw, source)


def build_run_config(raw: Dict[str, Any], source: str = "<dict>") -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigError(
            "CONFIG_SCHEMA",
            f"{source}: {location}: {first['msg']}",
            debug_info=str(exc),
        )


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("CONFIG_READ", f"Cannot read config {path}", debug_info=str(exc))
    cfg = parse_run_config(text, str(path))
    logger.info(f"Loaded config '{cfg.name}' (order {cfg.order}, {cfg.units.value}) from {path}")
    return cfg


def render_run_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.model_dump(mode="json", exclude_none=True), sort_keys=False)


def with_overrides(cfg: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """Apply dotted-key overrides such as ``{"gains.c2": 0.3}`` and re-validate."""
    raw = cfg.model_dump(mode="json", exclude_none=True)
    for key, value in overrides.items():
        parts = key.split(".")
        node = raw
        for part in parts[:-1]:
            child = node.get(part) if isinstance(node, dict) else None
            if not isinstance(child, dict):
                raise ConfigError("BAD_SWEEP_AXIS", f"Unknown config section in '{key}'")
            node = child
        if parts[-1] not in node and parts[-1] not in _optional_leaves(parts[:-1]):
            raise ConfigError("BAD_SWEEP_AXIS", f"Unknown config key '{key}'")
        node[parts[-1]] = value
    return build_run_config(raw, source="sweep override")


def _optional_leaves(section: List[str]) -> List[str]:
    # Optional fields that exclude_none drops but sweeps may still set
    known = {
        ("gains",): ["c3"],
        ("params",): ["epsilon", "epsilon1", "epsilon2"],
        ("initial",): ["a0"],
        ("output",): ["directory"],
    }
    return known.get(tuple(section), [])


__all__ = [
    "RunConfig",
    "OutputConfig",
    "AnalysisConfig",
    "parse_run_config",
    "build_run_config",
    "load_run_config",
    "render_run_config",
    "with_overrides",
]
