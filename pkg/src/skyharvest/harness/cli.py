"""Command-line entry point: ``skyharvest <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from skyharvest.channel import NoCoverage, coverage_angle, coverage_radius, get_profile, load_profiles
from skyharvest.clustering import BudgetExceeded, Clustering, clustering_sweep, lloyd_kmeans, plan_clusterheads
from skyharvest.core import Point3, RadioConfig, Scenario, generate_scenario
from skyharvest.harness.config import EXPERIMENTS, ConfigError, load_config
from skyharvest.harness.experiments import run_experiment
from skyharvest.harness.io import emit_csv, emit_summary, format_value, write_rows
from skyharvest.routing import (
    GAConfig,
    Infeasible,
    InstanceTooLarge,
    brute_force_mtsp,
    ga_mtsp,
    ga_mtsp_fair,
    nearest_neighbor_route,
    tspn_adjust,
)

log = logging.getLogger("skyharvest")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _write_trace(scenario: Scenario, out: Path, k: int, seed: int) -> None:
    result = lloyd_kmeans(scenario.sensor_xy, min(k, scenario.n_sensors), seed, trace=True)
    rows = [
        {"iteration": it, "centroid": j, "x": float(c[0]), "y": float(c[1])}
        for it, snap in enumerate(result.trace)
        for j, c in enumerate(snap)
    ]
    write_rows(out / "kmeans_trace.csv", ["iteration", "centroid", "x", "y"], rows)


def cmd_experiment(args) -> int:
    try:
        cfg = load_config(args.config, name=args.name, seed=args.seed)
        if args.replications is not None:
            cfg = replace(cfg, replications=args.replications)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("running %s with %d replication(s)", cfg.name, cfg.replications)
    result = run_experiment(cfg)
    emit_csv(result, out / f"{cfg.name}.csv")
    emit_summary(result, out / f"{cfg.name}_summary.csv")
    if args.trace:
        _write_trace(cfg.scenario, out, args.trace_k, cfg.base_seed)
    print(f"wrote {len(result.records)} rows to {out / (cfg.name + '.csv')}")
    return EXIT_INFEASIBLE if result.all_infeasible else EXIT_OK


def cmd_scenario(args) -> int:
    dock = Point3(*args.dock) if args.dock else None
    sc = generate_scenario(args.seed, args.n, args.width, args.height, dock, args.max_chs, args.max_uavs,
                           args.altitude, args.speed)
    sc.save(args.out)
    print(f"wrote scenario with {sc.n_sensors} sensors to {args.out}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    try:
        sc = Scenario.load(args.scenario)
    except (OSError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    try:
        clustering = plan_clusterheads(sc, args.d_th, seed=args.seed)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        clustering = exc.clustering
        status = EXIT_INFEASIBLE
    clustering.save(out / "clustering.json")
    print(f"K'={clustering.k_prime} d_max={clustering.d_max:.1f} m -> {out / 'clustering.json'}")
    if args.sweep:
        records = clustering_sweep(sc, _floats(args.sweep), args.runs, base_seed=args.seed)
        rows = [{"d_th_m": r.d_th, "run": r.run, "k_prime": r.k_prime} for r in records]
        write_rows(out / "sweep.csv", ["d_th_m", "run", "k_prime"], rows)
    if args.trace:
        _write_trace(sc, out, args.trace_k, sc.seed if args.seed is None else args.seed)
    return status


def cmd_route(args) -> int:
    try:
        clustering = Clustering.load(args.clustering)
    except (OSError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    speed = args.speed
    if args.scenario:
        sc = Scenario.load(args.scenario)
        dock = sc.dock
        speed = speed or sc.uav_speed
        altitude = args.altitude or sc.uav_altitude
    else:
        dock = Point3(*args.dock)
        altitude = args.altitude or 200.0
    speed = speed or 10.0
    ch = clustering.ch_xy
    ga_cfg = GAConfig(population_size=args.population, max_generations=args.generations)
    try:
        if args.delta_th is not None:
            if args.solver != "ga":
                print("config error: --delta-th needs --solver ga", file=sys.stderr)
                return EXIT_CONFIG
            plan = ga_mtsp_fair(ch, dock, args.uavs, altitude, args.delta_th, ga_cfg, args.seed, speed)
        elif args.solver == "exact":
            plan = brute_force_mtsp(ch, dock, args.uavs, altitude, speed)
        elif args.solver == "nn":
            plan = nearest_neighbor_route(ch, dock, args.uavs, altitude, speed)
        else:
            plan = ga_mtsp(ch, dock, args.uavs, altitude, ga_cfg, args.seed, speed)
    except InstanceTooLarge as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.tspn_radius:
        if args.tspn_radius == "auto":
            try:
                radius = coverage_radius(get_profile(args.env), RadioConfig(), altitude)
            except NoCoverage as exc:
                print(f"infeasible: {exc}", file=sys.stderr)
                return EXIT_INFEASIBLE
        else:
            radius = float(args.tspn_radius)
        plan = tspn_adjust(plan, radius)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    plan.save(out / "route_plan.json")
    plan.write_legs_csv(out / "legs.csv")
    print(f"{args.solver}: total {plan.total_length:.1f} m over {plan.n_uavs} UAV(s), "
          f"std {plan.std_dev:.1f} m, mission time {plan.mission_time:.1f} s")
    return EXIT_OK


def cmd_channel(args) -> int:
    profiles = load_profiles(args.registry) if args.registry else None
    try:
        env = profiles[args.env] if profiles else get_profile(args.env)
    except KeyError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = RadioConfig(p_c=args.p_c, p_th=args.p_th, f_c=args.f_c)
    zs = np.arange(args.z_min, args.z_max + 0.5 * args.z_step, args.z_step)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["z_m", "theta_star_rad", "radius_m"])
    for z in zs:
        try:
            theta = coverage_angle(env, cfg, float(z))
            radius = 0.0 if theta == math.pi / 2 else float(z) / math.tan(theta)
        except NoCoverage:
            theta = radius = math.nan
        writer.writerow([format_value(float(z)), format_value(theta), format_value(radius)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skyharvest", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run a figure-reproduction experiment")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override base seed")
    p.add_argument("--replications", type=int)
    p.add_argument("--trace", action="store_true", help="dump per-iteration k-means centroids")
    p.add_argument("--trace-k", type=int, default=5)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("scenario", help="generate a random sensor field")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--width", type=float, default=10_000.0)
    p.add_argument("--height", type=float, default=10_000.0)
    p.add_argument("--dock", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--max-chs", type=int)
    p.add_argument("--max-uavs", type=int, default=3)
    p.add_argument("--altitude", type=float, default=200.0)
    p.add_argument("--speed", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("cluster", help="place cluster heads for a scenario")
    p.add_argument("scenario")
    p.add_argument("--d-th", type=float, default=1700.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--sweep", help="comma-separated d_th values for a K' sweep")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--trace-k", type=int, default=5)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("route", help="plan UAV tours over a clustering")
    p.add_argument("clustering")
    p.add_argument("--uavs", type=int, default=1)
    p.add_argument("--solver", choices=("exact", "nn", "ga"), default="ga")
    p.add_argument("--altitude", type=float)
    p.add_argument("--speed", type=float)
    p.add_argument("--tspn-radius", help="hover radius in m, or 'auto' for the coverage radius")
    p.add_argument("--env", default="urban")
    p.add_argument("--delta-th", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=500)
    p.add_argument("--generations", type=int, default=1000)
    p.add_argument("--scenario", help="scenario JSON supplying dock, altitude, speed")
    p.add_argument("--dock", type=float, nargs=2, default=(5000.0, 5000.0), metavar=("X", "Y"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("channel", help="print coverage radius vs altitude as CSV")
    p.add_argument("--env", default="urban")
    p.add_argument("--registry", help="environment profile registry JSON")
    p.add_argument("--z-min", type=float, default=50.0)
    p.add_argument("--z-max", type=float, default=1000.0)
    p.add_argument("--z-step", type=float, default=50.0)
    p.add_argument("--p-c", type=float, default=20.0)
    p.add_argument("--p-th", type=float, default=-100.0)
    p.add_argument("--f-c", type=float, default=2.0e9)
    p.set_defaults(func=cmd_channel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
