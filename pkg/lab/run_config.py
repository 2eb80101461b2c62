"""Run configuration: one agent, one environment, one rehearsal strategy, one seed.

Config files are TOML with the sections [run], [physics], [agent] and
[rehearsal]. Every key is optional; unknown keys are rejected by name.
"""

import dataclasses
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

import config
from agent import AgentHyperparams
from environment import PhysicsParams
from errors import ConfigError, ResultsIOError
from rehearsal import RehearsalConfig, RehearsalMode

logger = logging.getLogger(__name__)

RUN_KEYS = ("label", "episodes", "step_cap", "seed", "hidden_width")


def _default_rehearsal() -> RehearsalConfig:
    return RehearsalConfig(batch_iterations=config.BATCH_ITERATIONS)


@dataclass(frozen=True)
class RunConfig:
    physics: PhysicsParams = field(default_factory=PhysicsParams)
    hyper: AgentHyperparams = field(default_factory=AgentHyperparams)
    rehearsal: RehearsalConfig = field(default_factory=_default_rehearsal)
    hidden_width: int = config.HIDDEN_WIDTH
    episodes: int = config.EPISODES
    step_cap: int = config.STEP_CAP
    seed: int = 0
    label: str = ""

    def __post_init__(self):
        if self.episodes < 1:
            raise ConfigError(f"run.episodes must be at least 1, got {self.episodes}")
        if self.step_cap < 1:
            raise ConfigError(f"run.step_cap must be at least 1, got {self.step_cap}")
        if self.hidden_width < 1:
            raise ConfigError(f"run.hidden_width must be at least 1, got {self.hidden_width}")
        if self.seed < 0:
            raise ConfigError(f"run.seed must be non-negative, got {self.seed}")
        if not self.label:
            object.__setattr__(self, "label", self.rehearsal.mode.value)

    def with_overrides(self, seed: Optional[int] = None, episodes: Optional[int] = None,
                       force: Optional[float] = None, mode: Optional[str] = None,
                       pr: Optional[int] = None, reinit: Optional[int] = None,
                       label: Optional[str] = None) -> "RunConfig":
        """Copy with command-line values applied; an overridden mode also relabels"""
        rehearsal = self.rehearsal
        if mode is not None:
            rehearsal = replace(rehearsal, mode=RehearsalMode.parse(mode))
        if pr is not None:
            rehearsal = replace(rehearsal, pr=pr)
        if reinit is not None:
            rehearsal = replace(rehearsal, reinit_period=reinit)

        physics = self.physics if force is None else replace(self.physics, force_magnitude=force)
        if label is None:
            label = rehearsal.mode.value if mode is not None else self.label
        return replace(
            self,
            physics=physics,
            rehearsal=rehearsal,
            seed=self.seed if seed is None else seed,
            episodes=self.episodes if episodes is None else episodes,
            label=label,
        )

    def to_dict(self) -> Dict[str, Any]:
        rehearsal = dataclasses.asdict(self.rehearsal)
        rehearsal["mode"] = self.rehearsal.mode.value
        return {
            "run": {name: getattr(self, name) for name in RUN_KEYS},
            "physics": dataclasses.asdict(self.physics),
            "agent": dataclasses.asdict(self.hyper),
            "rehearsal": rehearsal,
        }


def _section(data: Dict[str, Any], name: str, allowed) -> Dict[str, Any]:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key '{name}.{key}'")
    return section


def _build(cls, section: Dict[str, Any], prefix: str, **extra):
    try:
        return cls(**section, **extra)
    except TypeError as e:
        raise ConfigError(f"invalid [{prefix}] section: {e}") from e


def run_config_from_dict(data: Dict[str, Any]) -> RunConfig:
    sections = ("run", "physics", "agent", "rehearsal")
    for name in data:
        if name not in sections:
            raise ConfigError(f"unknown section '[{name}]'")

    physics = _build(PhysicsParams, _section(data, "physics",
                     [f.name for f in dataclasses.fields(PhysicsParams)]), "physics")
    hyper = _build(AgentHyperparams, _section(data, "agent",
                   [f.name for f in dataclasses.fields(AgentHyperparams)]), "agent")

    rehearsal_section = dict(_section(data, "rehearsal",
                             [f.name for f in dataclasses.fields(RehearsalConfig)]))
    rehearsal_section.setdefault("batch_iterations", config.BATCH_ITERATIONS)
    if "mode" in rehearsal_section:
        rehearsal_section["mode"] = RehearsalMode.parse(str(rehearsal_section["mode"]))
    rehearsal = _build(RehearsalConfig, rehearsal_section, "rehearsal")

    run = _section(data, "run", RUN_KEYS)
    return _build(RunConfig, run, "run", physics=physics, hyper=hyper, rehearsal=rehearsal)


def load_run_config(path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    except OSError as e:
        raise ResultsIOError(path, f"cannot read config: {e}") from e

    run_config = run_config_from_dict(data)
    logger.info("Loaded run config %s (label=%s)", path, run_config.label)
    return run_config
