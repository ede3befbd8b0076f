"""Planning toolkit for multi-UAV data collection over clustered sensor fields."""

from skyharvest.core import (
    EnvironmentProfile,
    Point3,
    RadioConfig,
    Scenario,
    derive_seed,
    distance,
    elevation_angle,
    generate_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "EnvironmentProfile",
    "Point3",
    "RadioConfig",
    "Scenario",
    "derive_seed",
    "distance",
    "elevation_angle",
    "generate_scenario",
    "__version__",
]
