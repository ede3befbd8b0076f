"""Seeded experiment runners, one per reproduced figure.

Every replication ``r`` draws its randomness from ``derive_seed(base_seed, r)``
and returns plain row dicts; rows are then ordered by (sweep position, rep)
so the output does not depend on execution order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from skyharvest import __version__
from skyharvest.channel import NoCoverage, coverage_radius, get_profile, max_service_altitude
from skyharvest.clustering import BudgetExceeded, lloyd_kmeans, plan_clusterheads
from skyharvest.core import Scenario, derive_seed, make_rng
from skyharvest.harness.config import ExperimentConfig
from skyharvest.routing import (
    Infeasible,
    brute_force_mtsp,
    ga_mtsp,
    ga_mtsp_fair,
    make_plan,
    nearest_neighbor_route,
    tspn_adjust,
    tspn_gain,
)
from skyharvest.routing.solvers import MAX_EXACT_CHS, MAX_EXACT_UAVS

THREADS_ENV = "SKYHARVEST_THREADS"


@dataclass
class ExperimentResult:
    name: str
    columns: list[str]
    records: list[dict]
    metadata: dict = field(default_factory=dict)
    group_by: list[str] = field(default_factory=list)
    metrics: list[str] = field(default_factory=list)

    @property
    def all_infeasible(self) -> bool:
        return bool(self.records) and all(r["status"] != "ok" for r in self.records)

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    def summary(self) -> tuple[list[str], list[dict]]:
        """Mean/std of each metric per sweep point, over ok rows."""
        groups: dict[tuple, list[dict]] = {}
        for r in self.records:
            groups.setdefault(tuple(r[k] for k in self.group_by), []).append(r)
        columns = [*self.group_by, "n", "n_ok"]
        for m in self.metrics:
            columns += [f"{m}_mean", f"{m}_std"]
        rows = []
        for key, members in groups.items():
            ok = [r for r in members if r["status"] == "ok"]
            row = dict(zip(self.group_by, key), n=len(members), n_ok=len(ok))
            for m in self.metrics:
                vals = np.array([r[m] for r in ok if r[m] is not None and not _isnan(r[m])], dtype=float)
                row[f"{m}_mean"] = float(vals.mean()) if len(vals) else math.nan
                row[f"{m}_std"] = float(vals.std()) if len(vals) else math.nan
            rows.append(row)
        return columns, rows


def _isnan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)


def place_chs(scenario: Scenario, k: int, seed: int, placement: str) -> np.ndarray:
    """CH ground positions for routing experiments.

    ``uniform`` scatters ``k`` points over the area; ``kmeans`` clusters the
    scenario's sensors into ``k`` groups and uses the centroids.
    """
    if placement == "uniform":
        rng = make_rng(seed)
        return rng.uniform(0.0, 1.0, size=(k, 2)) * [scenario.area_width, scenario.area_height]
    if placement == "kmeans":
        return lloyd_kmeans(scenario.sensor_xy, k, seed).ch_xy
    raise ValueError(f"unknown ch_placement {placement!r}")


# --- per-replication workers -------------------------------------------------


def _rep_clustering_sweep(cfg: ExperimentConfig, rep: int) -> list[tuple]:
    seed = derive_seed(cfg.base_seed, rep)
    rows = []
    for i, d_th in enumerate(cfg.params["d_th_values"]):
        try:
            c = plan_clusterheads(cfg.scenario, float(d_th), seed=seed)
            row = dict(k_prime=c.k_prime, d_max_m=c.d_max, status="ok")
        except BudgetExceeded as exc:
            row = dict(k_prime=exc.k, d_max_m=exc.d_max, status="budget_exceeded")
        rows.append(((i,), dict(d_th_m=float(d_th), run=rep, seed=seed, **row)))
    return rows


def _rep_solver_compare(cfg: ExperimentConfig, rep: int) -> list[tuple]:
    p = cfg.params
    seed = derive_seed(cfg.base_seed, rep)
    sc = cfg.scenario
    uavs = int(p["uavs"])
    rows = []
    for i, k in enumerate(p["k_values"]):
        k = int(k)
        ch = place_chs(sc, k, derive_seed(seed, k), p["ch_placement"])
        row = dict(k_prime=k, uavs=uavs, rep=rep, seed=seed)
        try:
            nn = nearest_neighbor_route(ch, sc.dock, uavs, sc.uav_altitude, sc.uav_speed).total_length
            ga = ga_mtsp(ch, sc.dock, uavs, sc.uav_altitude, cfg.ga, derive_seed(seed, k, 1), sc.uav_speed).total_length
            exact = math.nan
            if k <= MAX_EXACT_CHS and uavs <= MAX_EXACT_UAVS:
                exact = brute_force_mtsp(ch, sc.dock, uavs, sc.uav_altitude, sc.uav_speed).total_length
            row.update(
                exact_m=exact, ga_m=ga, nn_m=nn,
                gap_ga=ga / exact - 1.0 if not math.isnan(exact) else math.nan,
                gap_nn=nn / exact - 1.0 if not math.isnan(exact) else math.nan,
                status="ok",
            )
        except Infeasible:
            row.update(exact_m=math.nan, ga_m=math.nan, nn_m=math.nan, gap_ga=math.nan, gap_nn=math.nan,
                       status="infeasible")
        rows.append(((i,), row))
    return rows


def _rep_tspn_gain(cfg: ExperimentConfig, rep: int) -> list[tuple]:
    p = cfg.params
    seed = derive_seed(cfg.base_seed, rep)
    sc = cfg.scenario
    rows = []
    for i, k in enumerate(p["k_values"]):
        k = int(k)
        ch = place_chs(sc, k, derive_seed(seed, k), p["ch_placement"])
        plan = ga_mtsp(ch, sc.dock, 1, sc.uav_altitude, cfg.ga, derive_seed(seed, k, 1), sc.uav_speed)
        for j, radius in enumerate(p["radius_values"]):
            row = dict(k_prime=k, rep=rep, seed=seed)
            try:
                if radius == "auto":
                    radius = coverage_radius(cfg.env, cfg.radio, sc.uav_altitude)
                adjusted = tspn_adjust(plan, float(radius))
                row.update(radius_m=float(radius), d_tsp_m=plan.total_length, d_tspn_m=adjusted.total_length,
                           rho=tspn_gain(plan.total_length, adjusted.total_length), status="ok")
            except NoCoverage:
                row.update(radius_m=math.nan, d_tsp_m=plan.total_length, d_tspn_m=plan.total_length,
                           rho=0.0, status="no_coverage")
            rows.append(((i, j), row))
    return rows


def _rep_altitude_gain(cfg: ExperimentConfig, rep: int) -> list[tuple]:
    p = cfg.params
    seed = derive_seed(cfg.base_seed, rep)
    sc = cfg.scenario
    k = int(p["k"])
    ch = place_chs(sc, k, derive_seed(seed, k), p["ch_placement"])
    rows = []
    # horizontal tour length does not depend on z, so one TSP serves every altitude
    base = ga_mtsp(ch, sc.dock, 1, sc.uav_altitude, cfg.ga, derive_seed(seed, k, 1), sc.uav_speed)
    for i, env_name in enumerate(p["envs"]):
        env = get_profile(env_name) if isinstance(env_name, str) else env_name
        for j, z in enumerate(p["z_values"]):
            z = float(z)
            row = dict(env=env.name, z_m=z, k_prime=k, rep=rep, seed=seed, d_tsp_m=base.total_length)
            try:
                radius = coverage_radius(env, cfg.radio, z)
                at_z = make_plan(base.routes, base.centers, base.dock, z, base.speed)
                adjusted = tspn_adjust(at_z, radius)
                row.update(radius_m=radius, d_tspn_m=adjusted.total_length,
                           rho=tspn_gain(base.total_length, adjusted.total_length), status="ok")
            except NoCoverage:
                row.update(radius_m=math.nan, d_tspn_m=math.nan, rho=0.0, status="no_coverage")
            rows.append(((i, j), row))
    return rows


def _multi_row(cfg, ch, uavs, fair, delta, seed):
    sc = cfg.scenario
    try:
        if fair:
            plan = ga_mtsp_fair(ch, sc.dock, uavs, sc.uav_altitude, delta, cfg.ga, seed, sc.uav_speed)
        else:
            plan = ga_mtsp(ch, sc.dock, uavs, sc.uav_altitude, cfg.ga, seed, sc.uav_speed)
    except Infeasible:
        return dict(mean_len_per_uav_m=math.nan, std_m=math.nan, total_m=math.nan,
                    mission_time_s=math.nan, status="infeasible")
    return dict(mean_len_per_uav_m=plan.total_length / uavs, std_m=plan.std_dev, total_m=plan.total_length,
                mission_time_s=plan.mission_time, status="ok")


def _rep_multi_uav(cfg: ExperimentConfig, rep: int) -> list[tuple]:
    p = cfg.params
    seed = derive_seed(cfg.base_seed, rep)
    delta = float(p["delta_th"])
    rows = []
    for i, k in enumerate(p["k_values"]):
        k = int(k)
        ch = place_chs(cfg.scenario, k, derive_seed(seed, k), p["ch_placement"])
        for j, uavs in enumerate(p["uav_values"]):
            uavs = int(uavs)
            for fair in (False, True):
                row = dict(k_prime=k, uavs=uavs, fair=int(fair), delta_th_m=delta if fair else math.nan,
                           rep=rep, seed=seed)
                row.update(_multi_row(cfg, ch, uavs, fair, delta, derive_seed(seed, k, uavs)))
                rows.append(((i, j, int(fair)), row))
    return rows


def _rep_fairness(cfg: ExperimentConfig, rep: int) -> list[tuple]:
    p = cfg.params
    seed = derive_seed(cfg.base_seed, rep)
    rows = []
    for i, k in enumerate(p["k_values"]):
        k = int(k)
        ch = place_chs(cfg.scenario, k, derive_seed(seed, k), p["ch_placement"])
        for j, uavs in enumerate(p["uav_values"]):
            uavs = int(uavs)
            for m, delta in enumerate(p["delta_values"]):
                row = dict(delta_th_m=float(delta), k_prime=k, uavs=uavs, rep=rep, seed=seed)
                row.update(_multi_row(cfg, ch, uavs, True, float(delta), derive_seed(seed, k, uavs)))
                rows.append(((m, i, j), row))
    return rows


_WORKERS = {
    "clustering_sweep": _rep_clustering_sweep,
    "solver_compare": _rep_solver_compare,
    "tspn_gain": _rep_tspn_gain,
    "altitude_gain": _rep_altitude_gain,
    "multi_uav": _rep_multi_uav,
    "fairness": _rep_fairness,
}

_LAYOUT = {
    "clustering_sweep": (["d_th_m", "run", "seed", "k_prime", "d_max_m", "status"],
                         ["d_th_m"], ["k_prime", "d_max_m"]),
    "solver_compare": (["k_prime", "uavs", "rep", "seed", "exact_m", "ga_m", "nn_m", "gap_ga", "gap_nn", "status"],
                       ["k_prime", "uavs"], ["exact_m", "ga_m", "nn_m", "gap_ga", "gap_nn"]),
    "tspn_gain": (["k_prime", "radius_m", "rep", "seed", "d_tsp_m", "d_tspn_m", "rho", "status"],
                  ["k_prime", "radius_m"], ["d_tsp_m", "d_tspn_m", "rho"]),
    "altitude_gain": (["env", "z_m", "k_prime", "rep", "seed", "radius_m", "d_tsp_m", "d_tspn_m", "rho", "status"],
                      ["env", "z_m"], ["radius_m", "rho"]),
    "multi_uav": (["k_prime", "uavs", "fair", "delta_th_m", "rep", "seed", "mean_len_per_uav_m", "std_m",
                   "total_m", "mission_time_s", "status"],
                  ["k_prime", "uavs", "fair"], ["mean_len_per_uav_m", "std_m", "mission_time_s"]),
    "fairness": (["delta_th_m", "k_prime", "uavs", "rep", "seed", "mean_len_per_uav_m", "std_m", "total_m",
                  "mission_time_s", "status"],
                 ["delta_th_m", "k_prime", "uavs"], ["mean_len_per_uav_m", "std_m"]),
}


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_rep(args):
    cfg, rep = args
    return rep, _WORKERS[cfg.name](cfg, rep)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Run every replication of ``cfg`` and collect rows in canonical order."""
    if cfg.name not in _WORKERS:
        raise ValueError(f"unknown experiment {cfg.name!r}")
    started = time.perf_counter()
    jobs = [(cfg, rep) for rep in range(cfg.replications)]
    workers = min(workers or worker_count(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_rep, jobs))
    else:
        outputs = [_run_rep(job) for job in jobs]
    keyed = [(order, rep, row) for rep, rows in outputs for order, row in rows]
    keyed.sort(key=lambda t: (t[0], t[1]))
    columns, group_by, metrics = _LAYOUT[cfg.name]
    records = [{c: row.get(c) for c in columns} for _, _, row in keyed]
    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "wall_clock_s": round(time.perf_counter() - started, 3),
        "rows": len(records),
    }
    if cfg.name == "altitude_gain":
        meta["max_service_altitude_m"] = {
            (e if isinstance(e, str) else e.name): max_service_altitude(
                get_profile(e) if isinstance(e, str) else e, cfg.radio).altitude
            for e in cfg.params["envs"]
        }
    return ExperimentResult(cfg.name, columns, records, meta, group_by, metrics)


def experiment_altitude_gain(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_renamed(cfg, "altitude_gain"))


def experiment_multi_uav(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_renamed(cfg, "multi_uav"))


def _renamed(cfg: ExperimentConfig, name: str) -> ExperimentConfig:
    if cfg.name == name:
        return cfg
    return ExperimentConfig(name, cfg.scenario, cfg.radio, cfg.env, cfg.ga, {}, cfg.replications, cfg.base_seed)
