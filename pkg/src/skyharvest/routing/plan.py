"""Route plans, their metrics, and plan validation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from skyharvest.core import EnvironmentProfile, Point3, RadioConfig, distance, xy_array

DEFAULT_SPEED = 10.0  # m/s


class InstanceTooLarge(ValueError):
    pass


class Infeasible(RuntimeError):
    pass


def route_length(waypoints: Sequence[Point3]) -> float:
    if len(waypoints) < 2:
        raise ValueError("a route needs at least two waypoints")
    return sum(distance(p, q) for p, q in zip(waypoints[:-1], waypoints[1:]))


@dataclass(frozen=True)
class RoutePlan:
    """Ordered CH visits per UAV and the hover waypoints realising them.

    ``waypoints[u]`` starts and ends with the dock at flight altitude.
    ``centers`` holds the ground positions of every CH, indexed like
    ``routes``.
    """

    routes: tuple[tuple[int, ...], ...]
    waypoints: tuple[tuple[Point3, ...], ...]
    lengths: tuple[float, ...]
    centers: tuple[Point3, ...]
    dock: Point3
    altitude: float
    speed: float = DEFAULT_SPEED

    @property
    def n_uavs(self) -> int:
        return len(self.routes)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    @property
    def std_dev(self) -> float:
        return trajectory_std(self)

    @property
    def mission_time(self) -> float:
        return mission_time(self, self.speed)

    def to_dict(self) -> dict:
        return {
            "routes": [list(r) for r in self.routes],
            "waypoints": [[list(p.as_tuple()) for p in wps] for wps in self.waypoints],
            "lengths": list(self.lengths),
            "total_length": self.total_length,
            "std_dev": self.std_dev,
            "mission_time": self.mission_time,
            "ch_positions": [list(p.as_tuple()) for p in self.centers],
            "dock": list(self.dock.as_tuple()),
            "altitude": self.altitude,
            "speed": self.speed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RoutePlan":
        return cls(
            routes=tuple(tuple(int(i) for i in r) for r in data["routes"]),
            waypoints=tuple(tuple(Point3.from_seq(p) for p in wps) for wps in data["waypoints"]),
            lengths=tuple(float(x) for x in data["lengths"]),
            centers=tuple(Point3.from_seq(p) for p in data["ch_positions"]),
            dock=Point3.from_seq(data["dock"]),
            altitude=float(data["altitude"]),
            speed=float(data.get("speed", DEFAULT_SPEED)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def legs(self):
        """Yield (uav, leg, start, end, length) for every flown segment."""
        for u, wps in enumerate(self.waypoints):
            for leg, (p, q) in enumerate(zip(wps[:-1], wps[1:])):
                yield u, leg, p, q, distance(p, q)

    def write_legs_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["uav", "leg", "x0", "y0", "z0", "x1", "y1", "z1", "length_m"])
            for u, leg, p, q, length in self.legs():
                w.writerow([u, leg, *(f"{v:.6g}" for v in (*p.as_tuple(), *q.as_tuple(), length))])


def overhead_waypoints(route: Sequence[int], centers: Sequence[Point3], dock: Point3, altitude: float) -> tuple[Point3, ...]:
    home = dock.at_altitude(altitude)
    return (home, *(centers[i].at_altitude(altitude) for i in route), home)


def make_plan(
    routes: Sequence[Sequence[int]],
    centers: Sequence[Point3] | np.ndarray,
    dock: Point3,
    altitude: float,
    speed: float = DEFAULT_SPEED,
    waypoints: Sequence[Sequence[Point3]] | None = None,
) -> RoutePlan:
    """Assemble a RoutePlan; hover waypoints default to straight above each CH."""
    if isinstance(centers, np.ndarray):
        centers = tuple(Point3(x, y, 0.0) for x, y in xy_array(centers))
    centers = tuple(centers)
    routes = tuple(tuple(int(i) for i in r) for r in routes)
    if waypoints is None:
        waypoints = tuple(overhead_waypoints(r, centers, dock, altitude) for r in routes)
    else:
        waypoints = tuple(tuple(w) for w in waypoints)
    lengths = tuple(route_length(w) for w in waypoints)
    return RoutePlan(routes, waypoints, lengths, centers, Point3(dock.x, dock.y, 0.0), altitude, speed)


def mission_time(plan: RoutePlan, speed: float) -> float:
    """Average per-UAV flight time (s); hovering is not counted."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    if not plan.lengths:
        return 0.0
    return sum(length / speed for length in plan.lengths) / len(plan.lengths)


def trajectory_std(plan: RoutePlan) -> float:
    """Population standard deviation of per-UAV route lengths."""
    if not plan.lengths:
        return 0.0
    return float(np.std(np.asarray(plan.lengths, dtype=float)))


def check_instance(n_ch: int, n_uavs: int) -> None:
    if n_uavs < 1:
        raise ValueError("need at least one UAV")
    if n_ch < n_uavs:
        raise Infeasible(f"{n_ch} cluster heads cannot keep {n_uavs} UAVs busy")


@dataclass(frozen=True)
class ValidationReport:
    checks: dict[str, bool]
    messages: dict[str, str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def validate_plan(
    plan: RoutePlan,
    clustering=None,
    env: EnvironmentProfile | None = None,
    cfg: RadioConfig | None = None,
    radius: float = 0.0,
) -> ValidationReport:
    """Check a plan against the routing constraints.

    Checks: CH partition, dock endpoints, received power at every hover
    waypoint (when ``env`` and ``cfg`` are given), hover offset within
    ``radius``, and length/std bookkeeping.
    """
    from skyharvest.channel import received_power_at

    checks, msgs = {}, {}
    n_ch = clustering.k_prime if clustering is not None else len(plan.centers)
    visited = [i for r in plan.routes for i in r]
    checks["partition"] = sorted(visited) == list(range(n_ch)) and all(len(r) > 0 for r in plan.routes)
    if not checks["partition"]:
        msgs["partition"] = f"visits {sorted(visited)} do not partition 0..{n_ch - 1}"

    home = plan.dock.at_altitude(plan.altitude)
    endpoints = all(
        len(w) == len(r) + 2 and distance(w[0], home) <= 1e-9 and distance(w[-1], home) <= 1e-9
        for r, w in zip(plan.routes, plan.waypoints)
    ) and len(plan.routes) == len(plan.waypoints)
    checks["dock_endpoints"] = endpoints
    if not endpoints:
        msgs["dock_endpoints"] = "a route does not start and end at the dock"

    if checks["partition"] and endpoints:
        offsets = [
            math.hypot(wp.x - plan.centers[i].x, wp.y - plan.centers[i].y)
            for r, w in zip(plan.routes, plan.waypoints)
            for i, wp in zip(r, w[1:-1])
        ]
        within = all(o <= radius * (1 + 1e-9) + 1e-9 for o in offsets)
        checks["hover_offset"] = within
        if not within:
            msgs["hover_offset"] = f"max hover offset {max(offsets):.3f} m exceeds radius {radius:.3f} m"
        if env is not None and cfg is not None:
            powers = [received_power_at(env, cfg, o, plan.altitude) for o in offsets]
            worst = min(powers) if powers else cfg.p_c
            checks["received_power"] = worst >= cfg.p_th - 1e-9
            if not checks["received_power"]:
                msgs["received_power"] = f"worst received power {worst:.3f} dBm < {cfg.p_th} dBm"

    consistent = len(plan.lengths) == len(plan.waypoints) and all(
        math.isclose(length, route_length(w), rel_tol=1e-6, abs_tol=1e-9)
        for length, w in zip(plan.lengths, plan.waypoints)
    )
    checks["length_consistency"] = consistent
    if not consistent:
        msgs["length_consistency"] = "stored lengths disagree with waypoints"
    return ValidationReport(checks, msgs)
