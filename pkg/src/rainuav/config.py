"""Run configuration files: schema, loading and conversion to library objects.

A run file is YAML with the sections ``scenario``, ``map``, ``training``,
``evaluation`` and ``validation`` plus a top-level ``seed``. Every section is
validated before any work starts; unknown keys are rejected.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import medium, pwe, radiomap, validation
from .agent.dqn import TrainConfig
from .env import EpisodeConfig
from .errors import ConfigurationError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BaseStationSpec(_Section):
    x: float
    y: float
    height: float
    beam_waist: float = Field(1.0, gt=0)


class MediumSpec(_Section):
    rain_rate: float = Field(ge=0)
    temperature: float = 20.0
    wind_speed: float = Field(0.0, ge=0)
    polarizability: str = medium.PRINTED

    @field_validator("polarizability")
    @classmethod
    def _known_form(cls, v):
        if v not in medium.POLARIZABILITY_FORMS:
            raise ValueError(f"must be one of {medium.POLARIZABILITY_FORMS}")
        return v


class ScenarioSpec(_Section):
    bounds: tuple[float, float, float, float, float, float]
    altitude: float
    frequency_ghz: float = Field(gt=0)
    base_stations: list[BaseStationSpec] = Field(min_length=2)
    medium: MediumSpec
    destination: tuple[float, float]


class MapSpec(_Section):
    resolution: float = Field(gt=0)
    azimuths: int = Field(64, ge=1)
    range_step: float = Field(5.0, gt=0)
    absorber_width: float = Field(0.15, ge=0, lt=0.5)
    max_angle_deg: float = Field(pwe.DEFAULT_MAX_ANGLE_DEG, gt=0, lt=90)
    domain_beam_radii: float = Field(12.0, gt=0)
    output: str = "map.rss"


class TrainingSpec(_Section):
    episodes: int = 3000
    max_steps: int = 300
    update_every: int = 5
    d_tol: float = 10.0
    epsilon0: float = 0.5
    epsilon_decay: float = 0.998
    r_des: float = 2000.0
    p_ob: float = 10000.0
    mu: float = 10.0 / 43.0
    capacity: int = 100_000
    batch_size: int = 16
    gamma: float = 0.99
    n_step: int = 3
    learning_rate: float = 1e-3
    hidden: tuple[int, ...] = (64, 64)
    log_window: int = 100
    reward_scale: float = 1.0
    sir_min_db: float = 10.0
    sir_cap_db: float = 60.0


class EvaluationSpec(_Section):
    starts: list[tuple[float, float]] | None = None
    random_starts: int = Field(50, ge=1)
    baseline: bool = True


class ValidationSpec(_Section):
    rain_rate: float = Field(12.5, ge=0)
    frequencies: list[float] = Field(default_factory=lambda: [10.0, 20.0, 30.0], min_length=1)
    tolerance: float = Field(0.25, ge=0)
    polarizability: str = medium.PRINTED
    waist_wavelengths: float = Field(20.0, gt=0)
    fit_span: float = Field(1200.0, gt=0)
    step_dz: float = Field(5.0, gt=0)
    temperature: float = 20.0
    wind_speed: float = Field(0.0, ge=0)

    @field_validator("polarizability")
    @classmethod
    def _known_form(cls, v):
        if v not in medium.POLARIZABILITY_FORMS:
            raise ValueError(f"must be one of {medium.POLARIZABILITY_FORMS}")
        return v


class RunConfig(_Section):
    seed: int = 0
    scenario: ScenarioSpec | None = None
    map: MapSpec | None = None
    training: TrainingSpec = TrainingSpec()
    evaluation: EvaluationSpec = EvaluationSpec()
    validation: ValidationSpec = ValidationSpec()

    @model_validator(mode="after")
    def _map_needs_scenario(self):
        if (self.scenario is None) != (self.map is None):
            raise ValueError("'scenario' and 'map' sections must be given together")
        return self

    # conversions -----------------------------------------------------------

    def require_scenario(self) -> ScenarioSpec:
        if self.scenario is None or self.map is None:
            raise ConfigurationError("this command needs 'scenario' and 'map' sections")
        return self.scenario

    def rain(self) -> medium.RainParameters:
        m = self.require_scenario().medium
        return medium.RainParameters(m.rain_rate, m.temperature, m.wind_speed)

    def build_scenario(self) -> radiomap.Scenario:
        sc = self.require_scenario()
        return radiomap.Scenario(
            bounds=sc.bounds,
            altitude=sc.altitude,
            base_stations=tuple(
                radiomap.BaseStation((b.x, b.y, b.height), b.beam_waist) for b in sc.base_stations
            ),
            frequency=sc.frequency_ghz,
            medium=self.rain(),
            resolution=self.map.resolution,
            polarizability=sc.medium.polarizability,
            azimuths=self.map.azimuths,
            range_step=self.map.range_step,
            absorber_width=self.map.absorber_width,
            max_angle_deg=self.map.max_angle_deg,
            domain_beam_radii=self.map.domain_beam_radii,
        )

    def train_config(self, episodes: int | None = None, seed: int | None = None) -> TrainConfig:
        t = self.training.model_dump(exclude={"sir_min_db", "sir_cap_db"})
        t["seed"] = self.seed if seed is None else seed
        if episodes is not None:
            t["episodes"] = episodes
        return TrainConfig(**t)

    def episode_config(self, train_config: TrainConfig, step_length: float) -> EpisodeConfig:
        return train_config.episode_config(
            self.require_scenario().destination,
            step_length,
            sir_min_db=self.training.sir_min_db,
            sir_cap_db=self.training.sir_cap_db,
        )

    def pwe_settings(self) -> validation.PweSettings:
        v = self.validation
        return validation.PweSettings(
            waist_wavelengths=v.waist_wavelengths,
            fit_span=v.fit_span,
            step_dz=v.step_dz,
            temperature=v.temperature,
            wind_speed=v.wind_speed,
            polarizability=v.polarizability,
        )


def _describe(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        kind = err["type"]
        if kind == "missing":
            lines.append(f"missing field '{where}'")
        elif kind == "extra_forbidden":
            lines.append(f"unknown key '{where}'")
        else:
            lines.append(f"{where}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data) -> RunConfig:
    """Validate a mapping; raises ``ConfigurationError`` naming offending fields."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a mapping at the top level")
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(_describe(exc)) from None
    cfg.train_config()
    if cfg.scenario is not None:
        scenario = cfg.build_scenario()  # geometry checks with remediation hints
        cfg.episode_config(cfg.train_config(), scenario.resolution)
        x_lo, y_lo, _, x_hi, y_hi, _ = scenario.bounds
        dx, dy = cfg.scenario.destination
        if not (x_lo <= dx <= x_hi and y_lo <= dy <= y_hi):
            raise ConfigurationError(f"destination ({dx}, {dy}) lies outside the footprint; move it inside the bounds")
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: invalid YAML ({exc})") from None
    return parse_config(data)


def bundled_scenarios() -> list[str]:
    root = resources.files("rainuav.scenarios")
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_bundled(name: str) -> RunConfig:
    names = bundled_scenarios()
    if name not in names:
        raise ConfigurationError(f"unknown bundled scenario {name!r}; available: {', '.join(names)}")
    text = resources.files("rainuav.scenarios").joinpath(f"{name}.yaml").read_text()
    return parse_config(yaml.safe_load(text))
