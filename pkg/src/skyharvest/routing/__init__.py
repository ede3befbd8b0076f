"""Multi-UAV tour planning over placed cluster heads."""

from skyharvest.routing.ga import GAConfig, GAResult, ga_mtsp, ga_mtsp_fair, ga_search
from skyharvest.routing.plan import (
    DEFAULT_SPEED,
    Infeasible,
    InstanceTooLarge,
    RoutePlan,
    ValidationReport,
    make_plan,
    mission_time,
    route_length,
    trajectory_std,
    validate_plan,
)
from skyharvest.routing.solvers import brute_force_mtsp, nearest_neighbor_route
from skyharvest.routing.tspn import circle_entry_point, tspn_adjust, tspn_gain

__all__ = [
    "DEFAULT_SPEED",
    "GAConfig",
    "GAResult",
    "Infeasible",
    "InstanceTooLarge",
    "RoutePlan",
    "ValidationReport",
    "brute_force_mtsp",
    "circle_entry_point",
    "ga_mtsp",
    "ga_mtsp_fair",
    "ga_search",
    "make_plan",
    "mission_time",
    "nearest_neighbor_route",
    "route_length",
    "trajectory_std",
    "tspn_adjust",
    "tspn_gain",
    "validate_plan",
]
