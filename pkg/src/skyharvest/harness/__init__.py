from skyharvest.harness.config import EXPERIMENTS, ConfigError, ExperimentConfig, config_from_dict, load_config
from skyharvest.harness.experiments import (
    ExperimentResult,
    experiment_altitude_gain,
    experiment_multi_uav,
    place_chs,
    run_experiment,
)
from skyharvest.harness.io import emit_csv, emit_summary

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "config_from_dict",
    "emit_csv",
    "emit_summary",
    "experiment_altitude_gain",
    "experiment_multi_uav",
    "load_config",
    "place_chs",
    "run_experiment",
]
