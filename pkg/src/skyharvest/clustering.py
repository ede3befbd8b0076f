"""Cluster-head placement: Lloyd k-means wrapped in a grow-K loop."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from skyharvest.core import Point3, Scenario, derive_seed, make_rng, xy_array

MAX_ITER = 300


class BudgetExceeded(RuntimeError):
    """Raised when K clusters still leave a sensor out of range."""

    def __init__(self, k: int, d_max: float, d_th: float, clustering: "Clustering"):
        super().__init__(f"{k} cluster heads reach d_max={d_max:.1f} m > d_th={d_th:.1f} m")
        self.k = k
        self.d_max = d_max
        self.d_th = d_th
        self.clustering = clustering


@dataclass(frozen=True)
class Clustering:
    ch_positions: tuple[Point3, ...]
    assignment: tuple[int, ...]
    k_prime: int
    d_max: float
    inertia: float = field(default=float("nan"), compare=False)
    n_iter: int = field(default=0, compare=False)
    # objective after each assignment step; non-increasing
    history: tuple[float, ...] = field(default=(), compare=False, repr=False)
    # centroid snapshots per iteration when tracing was requested
    trace: tuple[np.ndarray, ...] = field(default=(), compare=False, repr=False)

    @property
    def ch_xy(self) -> np.ndarray:
        return xy_array(self.ch_positions)

    def members(self, ch: int) -> list[int]:
        return [s for s, c in enumerate(self.assignment) if c == ch]

    def to_dict(self) -> dict:
        return {
            "ch_positions": [list(p.as_tuple()) for p in self.ch_positions],
            "assignment": list(self.assignment),
            "k_prime": self.k_prime,
            "d_max": self.d_max,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Clustering":
        return cls(
            ch_positions=tuple(Point3.from_seq(p) for p in data["ch_positions"]),
            assignment=tuple(int(a) for a in data["assignment"]),
            k_prime=int(data["k_prime"]),
            d_max=float(data["d_max"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "Clustering":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _sq_dists(xy: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = xy[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _plusplus_init(xy: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(xy)
    centers = np.empty((k, 2))
    centers[0] = xy[rng.integers(n)]
    closest = np.sum((xy - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centers[j] = xy[idx]
        closest = np.minimum(closest, np.sum((xy - centers[j]) ** 2, axis=1))
    return centers


def _lloyd_once(xy, k, rng, max_iter, trace):
    centers = _plusplus_init(xy, k, rng)
    snapshots = [centers.copy()] if trace else []
    history = []
    labels = None
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _sq_dists(xy, centers)
        new_labels = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(len(xy)), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros((k, 2))
        np.add.at(sums, labels, xy)
        nonempty = counts > 0
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        for j in np.flatnonzero(~nonempty):
            # empty cluster: reseed on the worst-served point
            own = np.sum((xy - centers[labels]) ** 2, axis=1)
            far = int(np.argmax(own))
            centers[j] = xy[far]
            labels[far] = j
        if trace:
            snapshots.append(centers.copy())
    else:
        # iteration cap: final nearest-centroid assignment for consistency
        labels = np.argmin(_sq_dists(xy, centers), axis=1)
    return centers, labels, history, n_iter, snapshots


def _build(xy, centers, labels, history, n_iter, snapshots) -> Clustering:
    dists = np.sqrt(np.sum((xy - centers[labels]) ** 2, axis=1))
    return Clustering(
        ch_positions=tuple(Point3(x, y, 0.0) for x, y in centers),
        assignment=tuple(int(c) for c in labels),
        k_prime=len(centers),
        d_max=float(dists.max()),
        inertia=float(np.sum(dists**2)),
        n_iter=n_iter,
        history=tuple(history),
        trace=tuple(snapshots),
    )


def lloyd_kmeans(
    points: Sequence[Point3] | np.ndarray,
    k: int,
    seed: int,
    n_init: int = 1,
    max_iter: int = MAX_ITER,
    trace: bool = False,
) -> Clustering:
    """Lloyd's k-means with k-means++ seeding.

    With ``n_init > 1`` the restart with the lowest within-cluster sum of
    squares is returned.  ``trace`` keeps centroid snapshots per iteration.
    """
    xy = xy_array(points)
    if not 1 <= k <= len(xy):
        raise ValueError(f"k={k} must lie in [1, {len(xy)}]")
    rng = make_rng(seed)
    best = None
    for _ in range(n_init):
        result = _build(xy, *_lloyd_once(xy, k, rng, max_iter, trace))
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def separated_count(xy: np.ndarray, d_th: float) -> int:
    """Size of a greedy set of points pairwise farther apart than ``2 * d_th``.

    No cluster of radius ``d_th`` can hold two of them, so this bounds the
    number of cluster heads from below.
    """
    chosen = np.empty((0, 2))
    limit = (2.0 * d_th) ** 2
    for p in xy:
        if len(chosen) == 0 or np.min(np.sum((chosen - p) ** 2, axis=1)) > limit:
            chosen = np.vstack([chosen, p])
    return len(chosen)


def plan_clusterheads(scenario: Scenario, d_th: float, seed: int | None = None) -> Clustering:
    """Smallest K' (grown from 1) whose k-means clustering keeps every sensor within ``d_th``.

    Each K' attempt runs k-means from scratch with its own sub-seed derived
    from ``seed`` (default: the scenario seed).  Values of K' below
    :func:`separated_count` cannot succeed and are skipped, which leaves
    the result unchanged.
    """
    if d_th <= 0:
        raise ValueError("d_th must be positive")
    base = scenario.seed if seed is None else seed
    xy = scenario.sensor_xy
    k_cap = min(scenario.max_chs, len(xy))
    k_start = min(separated_count(xy, d_th), k_cap)
    result = None
    for k in range(k_start, k_cap + 1):
        result = lloyd_kmeans(xy, k, derive_seed(base, k))
        if result.d_max <= d_th:
            return result
    raise BudgetExceeded(k_cap, result.d_max, d_th, result)


@dataclass(frozen=True)
class SweepRecord:
    d_th: float
    run: int
    seed: int
    k_prime: int
    d_max: float
    status: str


def clustering_sweep(
    scenario: Scenario,
    d_th_values: Sequence[float],
    runs_per_value: int,
    base_seed: int | None = None,
) -> list[SweepRecord]:
    """One plan_clusterheads run per (d_th, run); failures are kept as rows."""
    base = scenario.seed if base_seed is None else base_seed
    records = []
    for d_th in d_th_values:
        for run in range(runs_per_value):
            seed = derive_seed(base, run)
            try:
                c = plan_clusterheads(scenario, d_th, seed=seed)
                records.append(SweepRecord(d_th, run, seed, c.k_prime, c.d_max, "ok"))
            except BudgetExceeded as exc:
                records.append(SweepRecord(d_th, run, seed, exc.k, exc.d_max, "budget_exceeded"))
    return records
