"""Genetic algorithm for the multi-UAV tour problem.

Chromosome: a permutation of the CH indices plus a boolean cut vector of
length K'-1 with exactly U'-1 cuts; the cuts split the permutation into
consecutive, nonempty per-UAV routes.  The whole population is evaluated
and bred as numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from skyharvest.core import Point3, make_rng, xy_array
from skyharvest.routing.plan import DEFAULT_SPEED, Infeasible, RoutePlan, check_instance, make_plan
from skyharvest.routing.solvers import distance_matrix


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 500
    max_generations: int = 1000
    mutation_rate: float = 0.02  # per gene
    elite_fraction: float = 0.05
    stall_generations: int = 150
    tournament_size: int = 4
    breakpoint_rate: float = 0.1  # chance a child's cuts are redrawn
    delta_threshold: float | None = None  # meters

    def __post_init__(self):
        if self.population_size < 2 or self.max_generations < 1:
            raise ValueError("need population_size >= 2 and max_generations >= 1")
        for name in ("mutation_rate", "elite_fraction", "breakpoint_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.stall_generations < 1 or self.tournament_size < 1:
            raise ValueError("stall_generations and tournament_size must be >= 1")
        if self.delta_threshold is not None and self.delta_threshold < 0:
            raise ValueError("delta_threshold must be non-negative")

    @property
    def n_elite(self) -> int:
        return max(1, math.ceil(self.elite_fraction * self.population_size))


@dataclass(frozen=True)
class GAResult:
    plan: RoutePlan | None
    history: tuple[float, ...]  # best fitness per generation, inf while infeasible
    generations: int
    feasible: bool


def evaluate(dist: np.ndarray, perms: np.ndarray, cuts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Total and per-route lengths for a batch of chromosomes.

    ``dist`` has the dock as its last index.  Returns ``(totals, lengths)``
    with shapes (P,) and (P, U).
    """
    n, k = perms.shape
    dock = len(dist) - 1
    is_start = np.concatenate([np.ones((n, 1), bool), cuts], axis=1)
    is_end = np.concatenate([cuts, np.ones((n, 1), bool)], axis=1)
    step = np.zeros((n, k))
    step[:, 1:] = dist[perms[:, :-1], perms[:, 1:]]
    per_pos = np.where(is_start, dist[dock, perms], step) + np.where(is_end, dist[perms, dock], 0.0)
    totals = per_pos.sum(axis=1)
    n_routes = int(is_end[0].sum())
    ends = np.cumsum(per_pos, axis=1)[is_end].reshape(n, n_routes)
    lengths = np.diff(ends, axis=1, prepend=0.0)
    return totals, lengths


def _random_cuts(rng, n: int, k: int, n_uavs: int) -> np.ndarray:
    cuts = np.zeros((n, max(k - 1, 0)), dtype=bool)
    if n_uavs > 1:
        picks = np.argsort(rng.random((n, k - 1)), axis=1)[:, : n_uavs - 1]
        cuts[np.arange(n)[:, None], picks] = True
    return cuts


def ordered_crossover(p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Row-wise OX: keep a random slice of ``p1``, fill the rest in ``p2`` order.

    Filling starts right after the slice and wraps around, as in the
    classic operator.
    """
    n, k = p1.shape
    rows = np.arange(n)[:, None]
    a = rng.integers(0, k, size=n)
    b = rng.integers(a + 1, k + 1)
    cols = np.arange(k)[None, :]
    in_slice = (cols >= a[:, None]) & (cols < b[:, None])
    where_in_p1 = np.argsort(p1, axis=1)
    order = (cols + b[:, None]) % k  # positions visited from b, wrapping
    p2_rot = p2[rows, order]
    pos_in_p1 = where_in_p1[rows, p2_rot]
    taken = (pos_in_p1 >= a[:, None]) & (pos_in_p1 < b[:, None])
    fill_genes = p2_rot[rows, np.argsort(taken, axis=1, kind="stable")]
    child = np.empty_like(p1)
    child[rows, order] = fill_genes
    return np.where(in_slice, p1, child)


def swap_mutation(perms: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Each gene is swapped with a random position with probability ``rate``."""
    n, k = perms.shape
    if k < 2 or rate <= 0:
        return perms
    out = perms.copy()
    counts = rng.binomial(k, rate, size=n)
    for r in range(int(counts.max(initial=0))):
        rows = np.flatnonzero(counts > r)
        i = rng.integers(0, k, size=len(rows))
        j = rng.integers(0, k, size=len(rows))
        vi = out[rows, i]
        out[rows, i] = out[rows, j]
        out[rows, j] = vi
    return out


def _ranks(totals: np.ndarray, violation: np.ndarray) -> np.ndarray:
    order = np.lexsort((totals, violation))
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = np.arange(len(order))
    return ranks


def _decode(perm: np.ndarray, cut: np.ndarray) -> list[list[int]]:
    routes = [[int(perm[0])]]
    for pos in range(1, len(perm)):
        if cut[pos - 1]:
            routes.append([])
        routes[-1].append(int(perm[pos]))
    return routes


def ga_search(
    ch_points: Sequence[Point3] | np.ndarray,
    dock: Point3,
    n_uavs: int,
    altitude: float,
    cfg: GAConfig = GAConfig(),
    seed: int = 0,
    speed: float = DEFAULT_SPEED,
) -> GAResult:
    """Run the GA and report the best plan together with its fitness trace.

    With ``cfg.delta_threshold`` set, plans whose route-length standard
    deviation exceeds it are never preferred over compliant ones (among
    themselves they rank by excess spread).  ``plan`` is None when no
    compliant individual was found.
    """
    ch_xy = xy_array(ch_points)
    k = len(ch_xy)
    check_instance(k, n_uavs)
    dist = distance_matrix(ch_xy, dock)
    rng = make_rng(seed)
    size = cfg.population_size
    n_elite = min(cfg.n_elite, size)
    n_child = size - n_elite
    delta = cfg.delta_threshold

    perms = np.argsort(rng.random((size, k)), axis=1)
    cuts = _random_cuts(rng, size, k, n_uavs)

    def score(perms, cuts):
        totals, lengths = evaluate(dist, perms, cuts)
        if delta is None or math.isinf(delta):
            violation = np.zeros(len(totals))
        else:
            violation = np.maximum(lengths.std(axis=1) - delta, 0.0)
        return totals, violation

    totals, violation = score(perms, cuts)
    history = []
    best_key = (math.inf, math.inf)
    stall = 0
    generation = 0
    for generation in range(1, cfg.max_generations + 1):
        ranks = _ranks(totals, violation)
        top = int(np.argmin(ranks))
        key = (float(violation[top]), float(totals[top]))
        history.append(key[1] if key[0] == 0.0 else math.inf)
        if key[0] < best_key[0] or (key[0] == best_key[0] and key[1] < best_key[1] * (1 - 1e-12)):
            best_key, stall = key, 0
        else:
            stall += 1
            if stall >= cfg.stall_generations:
                break
        if generation == cfg.max_generations:
            break

        elite = np.argsort(ranks)[:n_elite]
        cand = rng.integers(0, size, size=(2, n_child, cfg.tournament_size))
        winners = np.take_along_axis(cand, np.argmin(ranks[cand], axis=2)[..., None], axis=2)[..., 0]
        mothers, fathers = winners
        kids = ordered_crossover(perms[mothers], perms[fathers], rng)
        kids = swap_mutation(kids, cfg.mutation_rate, rng)
        kid_cuts = cuts[mothers].copy()
        redraw = rng.random(n_child) < cfg.breakpoint_rate
        if redraw.any() and n_uavs > 1:
            kid_cuts[redraw] = _random_cuts(rng, int(redraw.sum()), k, n_uavs)
        kid_totals, kid_violation = score(kids, kid_cuts)

        perms = np.concatenate([perms[elite], kids])
        cuts = np.concatenate([cuts[elite], kid_cuts])
        totals = np.concatenate([totals[elite], kid_totals])
        violation = np.concatenate([violation[elite], kid_violation])

    ranks = _ranks(totals, violation)
    top = int(np.argmin(ranks))
    feasible = bool(violation[top] == 0.0)
    plan = None
    if feasible:
        plan = make_plan(_decode(perms[top], cuts[top]), ch_xy, dock, altitude, speed)
    return GAResult(plan, tuple(history), generation, feasible)


def ga_mtsp(
    ch_points: Sequence[Point3] | np.ndarray,
    dock: Point3,
    n_uavs: int,
    altitude: float,
    cfg: GAConfig = GAConfig(),
    seed: int = 0,
    speed: float = DEFAULT_SPEED,
) -> RoutePlan:
    """Best plan found by the GA, ignoring any fairness threshold in ``cfg``."""
    if cfg.delta_threshold is not None:
        cfg = GAConfig(**{**cfg.__dict__, "delta_threshold": None})
    return ga_search(ch_points, dock, n_uavs, altitude, cfg, seed, speed).plan


def ga_mtsp_fair(
    ch_points: Sequence[Point3] | np.ndarray,
    dock: Point3,
    n_uavs: int,
    altitude: float,
    delta_threshold: float,
    cfg: GAConfig = GAConfig(),
    seed: int = 0,
    speed: float = DEFAULT_SPEED,
) -> RoutePlan:
    """GA restricted to plans whose route-length std is at most ``delta_threshold``.

    Raises Infeasible when no such plan turned up.
    """
    cfg = GAConfig(**{**cfg.__dict__, "delta_threshold": float(delta_threshold)})
    result = ga_search(ch_points, dock, n_uavs, altitude, cfg, seed, speed)
    if not result.feasible:
        raise Infeasible(f"no plan with std <= {delta_threshold:g} m found")
    plan = result.plan
    if plan.std_dev > delta_threshold:
        # float drift between vectorised and scalar std; never return a violator
        raise Infeasible(f"best plan std {plan.std_dev:.6g} m exceeds {delta_threshold:g} m")
    return plan
