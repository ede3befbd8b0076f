"""Experiment configuration and its JSON form."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from skyharvest.channel import get_profile
from skyharvest.core import EnvironmentProfile, Point3, RadioConfig, Scenario, generate_scenario
from skyharvest.routing import GAConfig

EXPERIMENTS = ("clustering_sweep", "solver_compare", "tspn_gain", "altitude_gain", "multi_uav", "fairness")


class ConfigError(ValueError):
    pass


def _range(start, stop, step):
    return [float(v) for v in range(start, stop + 1, step)]


DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "clustering_sweep": {"d_th_values": _range(100, 2900, 200)},
    "solver_compare": {"k_values": [6, 7, 8, 9, 10], "uavs": 1, "ch_placement": "uniform"},
    "tspn_gain": {"k_values": [10], "radius_values": [1000.0], "ch_placement": "kmeans"},
    "altitude_gain": {
        "k": 20,
        "envs": ["suburban", "urban", "dense_urban", "high_rise"],
        "z_values": _range(50, 12000, 50),
        "ch_placement": "kmeans",
    },
    "multi_uav": {
        "k_values": [int(v) for v in _range(20, 120, 5)],
        "uav_values": [1, 2, 3],
        "delta_th": 10_000.0,
        "ch_placement": "kmeans",
    },
    "fairness": {
        "k_values": [40, 60, 80],
        "uav_values": [2, 3],
        "delta_values": [2_500.0, 5_000.0, 10_000.0, 20_000.0],
        "ch_placement": "kmeans",
    },
}

DEFAULT_REPLICATIONS = {
    "clustering_sweep": 100,
    "solver_compare": 6,
    "tspn_gain": 50,
    "altitude_gain": 1,
    "multi_uav": 1,
    "fairness": 1,
}

# keys whose values must be nonempty lists
LIST_PARAMS = {"d_th_values", "k_values", "radius_values", "envs", "z_values", "uav_values", "delta_values"}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    scenario: Scenario
    radio: RadioConfig = RadioConfig()
    env: EnvironmentProfile = get_profile("urban")
    ga: GAConfig = GAConfig()
    params: dict = field(default_factory=dict)
    replications: int = 1
    base_seed: int = 1

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        merged = {**DEFAULT_PARAMS[self.name], **self.params}
        unknown = set(merged) - set(DEFAULT_PARAMS[self.name])
        if unknown:
            raise ConfigError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        for key in LIST_PARAMS & set(merged):
            if not isinstance(merged[key], (list, tuple)) or len(merged[key]) == 0:
                raise ConfigError(f"{key} must be a nonempty list")
        object.__setattr__(self, "params", merged)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "scenario": scenario_summary(self.scenario),
            "radio": asdict(self.radio),
            "env": asdict(self.env),
            "ga": asdict(self.ga),
            "params": self.params,
            "replications": self.replications,
            "base_seed": self.base_seed,
        }


def scenario_summary(sc: Scenario) -> dict:
    d = sc.to_dict()
    d["n_sensors"] = len(d.pop("sensors"))
    return d


def _scenario_from(data: dict | None, base_seed: int) -> Scenario:
    data = dict(data or {})
    if "sensors" in data:
        return Scenario.from_dict(data)
    dock = data.pop("dock", None)
    n = int(data.pop("n_sensors", 500))
    seed = int(data.pop("seed", base_seed))
    allowed = {"area_width", "area_height", "max_chs", "max_uavs", "uav_altitude", "uav_speed"}
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown scenario keys: {sorted(extra)}")
    return generate_scenario(
        seed,
        n_sensors=n,
        dock=Point3.from_seq(dock) if dock is not None else None,
        **{k: (float(v) if k.startswith(("area", "uav")) else int(v)) for k, v in data.items()},
    )


def _build(cls, data: dict | None):
    if not data:
        return cls()
    names = {f.name for f in fields(cls)}
    extra = set(data) - names
    if extra:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(extra)}")
    return cls(**data)


def config_from_dict(data: dict, name: str | None = None, seed: int | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig; missing sections fall back to the defaults."""
    try:
        name = name or data.get("name")
        if name is None:
            raise ConfigError("experiment name missing")
        base_seed = int(seed if seed is not None else data.get("base_seed", 1))
        env = data.get("env", "urban")
        if isinstance(env, str):
            env = get_profile(env)
        else:
            env = EnvironmentProfile(**env)
        radio = data.get("radio") or {}
        if "d_th" in radio:
            radio = dict(radio)
            d_th = radio.pop("d_th")
            radio = RadioConfig.for_sensor_range(d_th, **radio)
        else:
            radio = _build(RadioConfig, radio)
        return ExperimentConfig(
            name=name,
            scenario=_scenario_from(data.get("scenario"), base_seed),
            radio=radio,
            env=env,
            ga=_build(GAConfig, data.get("ga")),
            params=dict(data.get("params") or {}),
            replications=int(data.get("replications", DEFAULT_REPLICATIONS.get(name, 1))),
            base_seed=base_seed,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None, name: str | None = None, seed: int | None = None) -> ExperimentConfig:
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if name is not None and data.get("name") not in (None, name):
            raise ConfigError(f"config {path} is for {data['name']!r}, not {name!r}")
    return config_from_dict(data, name=name, seed=seed)
