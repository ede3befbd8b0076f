import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skyharvest.clustering import (
    BudgetExceeded,
    Clustering,
    clustering_sweep,
    lloyd_kmeans,
    plan_clusterheads,
    separated_count,
)
from skyharvest.core import Point3, Scenario, derive_seed, generate_scenario


def _scenario(xy, width=10_000.0, height=10_000.0, max_chs=None, seed=3):
    pts = [Point3(x, y) for x, y in xy]
    return Scenario(width, height, pts, Point3(width / 2, height / 2), max_chs or len(pts), 1, seed=seed)


def _blob(rng, center, radius, n):
    r = radius * np.sqrt(rng.random(n))
    a = rng.random(n) * 2 * np.pi
    return np.column_stack([center[0] + r * np.cos(a), center[1] + r * np.sin(a)])


def test_single_point():
    c = lloyd_kmeans([Point3(3, 4)], 1, seed=0)
    assert c.ch_positions[0] == Point3(3, 4, 0) and c.d_max == 0


def test_k_out_of_range():
    with pytest.raises(ValueError):
        lloyd_kmeans([Point3(0, 0)], 2, seed=0)
    with pytest.raises(ValueError):
        lloyd_kmeans([Point3(0, 0)], 0, seed=0)


def test_four_blobs_recovered():
    rng = np.random.default_rng(0)
    centers = [(1000, 1000), (9000, 1000), (1000, 9000), (9000, 9000)]
    blobs = [_blob(rng, c, 200, 50) for c in centers]
    c = lloyd_kmeans(np.vstack(blobs), 4, seed=1, n_init=20)
    means = np.array([b.mean(axis=0) for b in blobs])
    for ch in c.ch_xy:
        assert np.min(np.hypot(*(means - ch).T)) <= 50


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 60), st.integers(1, 8))
def test_lloyd_invariants(seed, n, k):
    k = min(k, n)
    xy = np.random.default_rng(seed).uniform(0, 1000, size=(n, 2))
    c = lloyd_kmeans(xy, k, seed)
    hist = np.array(c.history)
    assert np.all(np.diff(hist) <= 1e-9 * max(hist[0], 1.0))
    labels = np.array(c.assignment)
    assert len(labels) == n and set(labels) <= set(range(k))
    d = np.hypot(*(xy[:, None, :] - c.ch_xy[None]).transpose(2, 0, 1))
    own = d[np.arange(n), labels]
    assert np.all(own <= d.min(axis=1) + 1e-9)
    assert c.d_max == pytest.approx(own.max())


def test_single_cluster_suffices():
    rng = np.random.default_rng(2)
    sc = _scenario(_blob(rng, (5000, 5000), 100, 40))
    assert plan_clusterheads(sc, 500).k_prime == 1


def test_two_blobs_need_two():
    rng = np.random.default_rng(4)
    xy = np.vstack([_blob(rng, (2500, 5000), 100, 30), _blob(rng, (7500, 5000), 100, 30)])
    c = plan_clusterheads(_scenario(xy), 500)
    assert c.k_prime == 2 and c.d_max <= 500


def test_budget_exceeded_reports_dmax():
    sc = generate_scenario(5, 100, max_chs=3)
    with pytest.raises(BudgetExceeded) as info:
        plan_clusterheads(sc, 300)
    assert info.value.k == 3 and info.value.d_max > 300
    assert info.value.clustering.k_prime == 3


def test_plan_is_minimal_and_feasible():
    sc = generate_scenario(11, 120, 4000, 4000)
    seed = 77
    c = plan_clusterheads(sc, 900, seed=seed)
    assert c.d_max <= 900
    assert sorted(set(c.assignment)) == list(range(c.k_prime))
    if c.k_prime > 1:
        smaller = lloyd_kmeans(sc.sensor_xy, c.k_prime - 1, derive_seed(seed, c.k_prime - 1))
        assert smaller.d_max > 900


def test_separated_count_is_a_lower_bound():
    sc = generate_scenario(8, 200, 5000, 5000)
    for d_th in (400.0, 800.0, 1500.0):
        lb = separated_count(sc.sensor_xy, d_th)
        assert lb <= plan_clusterheads(sc, d_th, seed=1).k_prime


def test_sweep_shape_and_trend():
    sc = generate_scenario(1, 300, 6000, 6000)
    assert len(clustering_sweep(sc, [1500.0], 1)) == 1
    recs = clustering_sweep(sc, [700.0, 1500.0, 2500.0], 4, base_seed=9)
    assert len(recs) == 12
    means = [np.mean([r.k_prime for r in recs if r.d_th == d]) for d in (700.0, 1500.0, 2500.0)]
    assert means[0] >= means[1] >= means[2]
    assert recs == clustering_sweep(sc, [700.0, 1500.0, 2500.0], 4, base_seed=9)


def test_small_range_needs_many_chs():
    sc = generate_scenario(1)
    assert plan_clusterheads(sc, 900, seed=1).k_prime > 34


def test_clustering_json(tmp_path):
    c = lloyd_kmeans(generate_scenario(2, 30).sensor_xy, 3, seed=4)
    c.save(tmp_path / "c.json")
    back = Clustering.load(tmp_path / "c.json")
    assert back == c
    assert set(c.to_dict()) == {"ch_positions", "assignment", "k_prime", "d_max"}


def test_trace_snapshots():
    c = lloyd_kmeans(generate_scenario(2, 50).sensor_xy, 4, seed=4, trace=True)
    assert len(c.trace) >= 2 and all(s.shape == (4, 2) for s in c.trace)
