import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skyharvest.core import (
    EnvironmentProfile,
    Point3,
    RadioConfig,
    Scenario,
    derive_seed,
    distance,
    elevation_angle,
    generate_scenario,
    make_rng,
    xy_array,
)

coord = st.floats(-1e6, 1e6, allow_nan=False)


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point3(math.nan, 0, 0)
    with pytest.raises(ValueError):
        Point3(0, math.inf)


@pytest.mark.parametrize(
    "p, q, expected",
    [((0, 0, 0), (0, 0, 0), 0.0), ((0, 0, 0), (3, 4, 0), 5.0), ((1, 2, 3), (4, 6, 3), 5.0)],
)
def test_distance_examples(p, q, expected):
    assert distance(Point3(*p), Point3(*q)) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.tuples(coord, coord, coord), st.tuples(coord, coord, coord), st.tuples(coord, coord, coord))
def test_distance_metric_properties(a, b, c):
    p, q, r = Point3(*a), Point3(*b), Point3(*c)
    assert distance(p, q) == distance(q, p)
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-6


def test_elevation_examples():
    ch = Point3(0, 0, 0)
    assert elevation_angle(ch, Point3(0, 0, 200)) == math.pi / 2
    assert elevation_angle(ch, Point3(200, 0, 200)) == pytest.approx(math.pi / 4)
    assert elevation_angle(ch, Point3(346.41, 0, 200)) == pytest.approx(math.pi / 6, abs=1e-6)


def test_elevation_requires_uav_above():
    with pytest.raises(ValueError):
        elevation_angle(Point3(0, 0, 10), Point3(5, 5, 10))


def test_generate_scenario_contract():
    sc = generate_scenario(1, 500, 10_000, 10_000)
    assert sc.n_sensors == 500
    xy = sc.sensor_xy
    assert np.all((xy >= 0) & (xy <= 10_000))
    assert sc.dock == Point3(5000, 5000, 0)
    assert generate_scenario(1).sensors == sc.sensors
    assert generate_scenario(2).sensors != sc.sensors


def test_generate_scenario_rejects_bad_input():
    with pytest.raises(ValueError):
        generate_scenario(1, area_width=0)
    with pytest.raises(ValueError):
        generate_scenario(1, n_sensors=0)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(10, 10, [Point3(11, 1)], Point3(5, 5), 1, 1)
    with pytest.raises(ValueError):
        Scenario(10, 10, [Point3(1, 1)], Point3(5, 5), 0, 1)


def test_scenario_json_round_trip(tmp_path):
    sc = generate_scenario(7, 20, 500, 300, max_chs=5, max_uavs=2, uav_altitude=150, uav_speed=12)
    path = tmp_path / "sc.json"
    sc.save(path)
    back = Scenario.load(path)
    assert back == sc
    assert np.array_equal(back.sensor_xy, sc.sensor_xy)


def test_seeds_are_stable_and_distinct():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert len({derive_seed(1, k) for k in range(100)}) == 100
    assert derive_seed(1, 2) != derive_seed(2, 1)
    assert 0 <= derive_seed(123, 4, 5) < 2**64
    assert make_rng(5).random() == make_rng(5).random()


def test_xy_array_forms():
    pts = [Point3(1, 2, 3), Point3(4, 5, 6)]
    assert xy_array(pts).tolist() == [[1, 2], [4, 5]]
    assert xy_array(np.array([[1.0, 2.0, 9.0]])).tolist() == [[1, 2]]
    assert xy_array([]).shape == (0, 2)


def test_config_validation():
    with pytest.raises(ValueError):
        EnvironmentProfile(a=1, b=1, nu_los=5, nu_nlos=1)
    with pytest.raises(ValueError):
        RadioConfig(p_c=-100, p_th=-90)
    with pytest.raises(ValueError):
        RadioConfig(alpha=6)
    cfg = RadioConfig.for_sensor_range(1700.0)
    assert cfg.snr_budget == pytest.approx(1700.0**2 * 1e-4)
