"""Hover-within-range adjustment of an existing tour, and the resulting gain."""

from __future__ import annotations

import math

from skyharvest.core import Point3
from skyharvest.routing.plan import RoutePlan, make_plan


def circle_entry_point(current: tuple[float, float], center: tuple[float, float], radius: float) -> tuple[float, float]:
    """First point of the coverage circle met when flying from ``current`` toward ``center``.

    Intersects the line through both points with the circle and keeps the
    root nearer to ``current``.  The line is written as y = p1*x + p2, or
    as x = p1*y + p2 when it is steeper than 45 degrees (this covers the
    vertical case).  Coordinates are taken relative to the circle center
    first, which keeps the quadratic well conditioned for small radii far
    from the origin.  A start already inside the circle is returned as is.
    """
    xc, yc = center
    xu, yu = current[0] - xc, current[1] - yc
    if math.hypot(xu, yu) <= radius:
        return (current[0], current[1])
    steep = abs(yu) > abs(xu)
    if steep:
        xu, yu = yu, xu
    p1 = yu / xu
    p2 = yu - p1 * xu
    q1 = p1 * p1 + 1.0
    q2 = p1 * p2
    q3 = p2 * p2 - radius * radius
    root = math.sqrt(max(q2 * q2 - q1 * q3, 0.0))
    x0 = (-q2 + root) / q1
    x1 = -(q2 + root) / q1
    cand0 = (x0, p1 * x0 + p2)
    cand1 = (x1, p1 * x1 + p2)
    d0 = math.hypot(cand0[0] - xu, cand0[1] - yu)
    d1 = math.hypot(cand1[0] - xu, cand1[1] - yu)
    x, y = cand0 if d0 <= d1 else cand1
    if steep:
        x, y = y, x
    return (x + xc, y + yc)


def tspn_adjust(plan: RoutePlan, radius: float) -> RoutePlan:
    """Move each hover point to where the UAV first enters the CH's coverage disc.

    Routes keep their visiting order and are processed from the dock
    onward, each step starting from the previously adjusted waypoint.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius == 0:
        return plan
    z = plan.altitude
    waypoints = []
    for route in plan.routes:
        cur = (plan.dock.x, plan.dock.y)
        wps = [plan.dock.at_altitude(z)]
        for ch in route:
            c = plan.centers[ch]
            cur = circle_entry_point(cur, (c.x, c.y), radius)
            wps.append(Point3(cur[0], cur[1], z))
        wps.append(plan.dock.at_altitude(z))
        waypoints.append(wps)
    return make_plan(plan.routes, plan.centers, plan.dock, z, plan.speed, waypoints)


def tspn_gain(d_tsp: float, d_tspn: float) -> float:
    """Relative distance saved by hovering within range: 1 - d_tspn / d_tsp."""
    if d_tsp <= 0:
        raise ValueError("d_tsp must be positive")
    return 1.0 - d_tspn / d_tsp
