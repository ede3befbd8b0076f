"""Exact enumeration and nearest-neighbour mTSP solvers."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from skyharvest.core import Point3, xy_array
from skyharvest.routing.plan import DEFAULT_SPEED, InstanceTooLarge, RoutePlan, check_instance, make_plan

MAX_EXACT_CHS = 10
MAX_EXACT_UAVS = 3
_TIE_RTOL = 1e-9


def distance_matrix(ch_xy: np.ndarray, dock: Point3) -> np.ndarray:
    """Pairwise ground distances; the dock is the last row/column."""
    pts = np.vstack([ch_xy, [[dock.x, dock.y]]])
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _better(cost, key, best_cost, best_key, scale) -> bool:
    if best_key is None:
        return True
    tol = _TIE_RTOL * scale
    if cost < best_cost - tol:
        return True
    return abs(cost - best_cost) <= tol and key < best_key


def subset_tours(dist: np.ndarray) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Shortest closed dock tour for every nonempty subset of CHs (Held-Karp).

    Returns per-mask costs and visit orders; among equal-cost orders the
    lexicographically smallest one is kept.
    """
    k = len(dist) - 1
    dock = k
    scale = float(dist.max()) * (k + 1) or 1.0
    n_masks = 1 << k
    cost = np.full((n_masks, k), np.inf)
    path: list[list[tuple[int, ...] | None]] = [[None] * k for _ in range(n_masks)]
    for j in range(k):
        cost[1 << j, j] = dist[dock, j]
        path[1 << j][j] = (j,)
    for mask in range(1, n_masks):
        for j in range(k):
            if path[mask][j] is None:
                continue
            base, base_path = cost[mask, j], path[mask][j]
            for nxt in range(k):
                if mask & (1 << nxt):
                    continue
                m2 = mask | (1 << nxt)
                c = base + dist[j, nxt]
                p = base_path + (nxt,)
                if _better(c, p, cost[m2, nxt], path[m2][nxt], scale):
                    cost[m2, nxt] = c
                    path[m2][nxt] = p
    tour_cost = np.full(n_masks, np.inf)
    tour_path: list[tuple[int, ...]] = [()] * n_masks
    for mask in range(1, n_masks):
        best_c, best_p = np.inf, None
        for j in range(k):
            p = path[mask][j]
            if p is None:
                continue
            c = cost[mask, j] + dist[j, dock]
            if _better(c, p, best_c, best_p, scale):
                best_c, best_p = c, p
        tour_cost[mask], tour_path[mask] = best_c, best_p
    return tour_cost, tour_path


def _partitions(items: int, blocks: int):
    """Yield set partitions of the bitmask ``items`` into ``blocks`` nonempty masks."""
    if blocks == 1:
        yield (items,)
        return
    low = items & -items
    rest = items ^ low
    sub = rest
    while True:
        block = sub | low
        remaining = items ^ block
        if remaining and bin(remaining).count("1") >= blocks - 1:
            for tail in _partitions(remaining, blocks - 1):
                yield (block, *tail)
        if sub == 0:
            break
        sub = (sub - 1) & rest


def brute_force_mtsp(
    ch_points: Sequence[Point3] | np.ndarray,
    dock: Point3,
    n_uavs: int,
    altitude: float,
    speed: float = DEFAULT_SPEED,
) -> RoutePlan:
    """Globally shortest split of the CHs into ``n_uavs`` nonempty dock tours.

    Every set partition is enumerated against per-subset optimal tours.
    Ties go to the lexicographically smallest encoding (routes sorted).
    """
    ch_xy = xy_array(ch_points)
    k = len(ch_xy)
    if k > MAX_EXACT_CHS or n_uavs > MAX_EXACT_UAVS:
        raise InstanceTooLarge(f"exact solver limited to K'<={MAX_EXACT_CHS}, U'<={MAX_EXACT_UAVS}")
    check_instance(k, n_uavs)
    dist = distance_matrix(ch_xy, dock)
    tour_cost, tour_path = subset_tours(dist)
    scale = float(dist.max()) * (k + 1) or 1.0
    best_c, best_routes = np.inf, None
    for blocks in _partitions((1 << k) - 1, n_uavs):
        c = sum(tour_cost[b] for b in blocks)
        routes = tuple(sorted(tour_path[b] for b in blocks))
        if _better(c, routes, best_c, best_routes, scale):
            best_c, best_routes = c, routes
    return make_plan(best_routes, ch_xy, dock, altitude, speed)


def nearest_neighbor_route(
    ch_points: Sequence[Point3] | np.ndarray,
    dock: Point3,
    n_uavs: int,
    altitude: float,
    speed: float = DEFAULT_SPEED,
) -> RoutePlan:
    """Greedy closest-unvisited-CH tours.

    Several UAVs take turns round-robin, each extending its own route from
    its current position.  Distance ties go to the lowest CH index.
    """
    ch_xy = xy_array(ch_points)
    k = len(ch_xy)
    check_instance(k, n_uavs)
    dist = distance_matrix(ch_xy, dock)
    unvisited = np.ones(k, dtype=bool)
    routes: list[list[int]] = [[] for _ in range(n_uavs)]
    position = [k] * n_uavs
    u = 0
    while unvisited.any():
        row = np.where(unvisited, dist[position[u], :k], np.inf)
        nxt = int(np.argmin(row))
        routes[u].append(nxt)
        unvisited[nxt] = False
        position[u] = nxt
        u = (u + 1) % n_uavs
    return make_plan(routes, ch_xy, dock, altitude, speed)
