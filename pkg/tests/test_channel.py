import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fspl_const, grid_coverage_radius
from skyharvest.channel import (
    PRESETS,
    URBAN,
    LinkBudget,
    NoCoverage,
    coverage_angle,
    coverage_radius,
    excess_loss_f,
    free_space_loss,
    get_profile,
    link_ok,
    load_profiles,
    los_probability,
    max_sensor_range,
    max_service_altitude,
    mean_path_loss,
    received_power_at,
    received_power_uav,
    snr_at_clusterhead,
)
from skyharvest.core import SPEED_OF_LIGHT, EnvironmentProfile, RadioConfig

CFG = RadioConfig()
LINK = LinkBudget.from_radio(CFG)


def test_snr_examples():
    cfg = RadioConfig(snr_budget=1e5, alpha=3)
    assert snr_at_clusterhead(cfg, 1) == 1e5
    assert snr_at_clusterhead(cfg, 1000) == pytest.approx(1e-4, rel=1e-12)
    assert max_sensor_range(cfg) == pytest.approx(1000.0, rel=1e-12)
    assert max_sensor_range(RadioConfig(snr_budget=1e-4, alpha=4)) == pytest.approx(1.0)
    assert max_sensor_range(RadioConfig.for_sensor_range(1700.0)) == pytest.approx(1700.0, rel=1e-12)
    with pytest.raises(ValueError):
        snr_at_clusterhead(cfg, 0)


@settings(max_examples=1000, deadline=None)
@given(st.floats(100, 2900), st.floats(2, 5), st.floats(1e-6, 1e-2))
def test_snr_at_range_equals_threshold(d_th, alpha, gamma):
    cfg = RadioConfig.for_sensor_range(d_th, alpha=alpha, gamma_th=gamma)
    d = max_sensor_range(cfg)
    assert d == pytest.approx(d_th, rel=1e-12)
    assert snr_at_clusterhead(cfg, d) == pytest.approx(gamma, rel=1e-12)


def test_los_probability_examples():
    theta = math.radians(URBAN.a)
    assert los_probability(URBAN, theta) == pytest.approx(1 / (1 + URBAN.a))
    assert los_probability(URBAN, theta) == pytest.approx(0.09424, abs=1e-5)
    assert los_probability(URBAN, math.pi / 2) == pytest.approx(1.0, abs=1e-12)
    tiny = EnvironmentProfile(a=1e-12, b=0.5, nu_los=1, nu_nlos=20)
    assert np.allclose(los_probability(tiny, np.linspace(0.01, math.pi / 2, 50)), 1.0)
    for bad in (0.0, -0.1, math.pi / 2 + 1e-6):
        with pytest.raises(ValueError):
            los_probability(URBAN, bad)


@pytest.mark.parametrize("env", list(PRESETS.values()), ids=list(PRESETS))
def test_los_probability_increasing(env):
    p = los_probability(env, np.linspace(1e-3, math.pi / 2, 5000))
    assert np.all((p > 0) & (p <= 1))
    assert np.all(np.diff(p) >= 0)
    # strict wherever the value has not rounded to 1.0
    below = p[1:] < 1 - 1e-12
    assert np.all(np.diff(p)[below] > 0)


def test_free_space_loss():
    assert free_space_loss(2e9) == pytest.approx(38.46, abs=0.01)
    assert free_space_loss(SPEED_OF_LIGHT / (4 * math.pi)) == pytest.approx(0.0, abs=1e-12)
    assert free_space_loss(4e9) - free_space_loss(2e9) == pytest.approx(20 * math.log10(2))
    assert free_space_loss(2e9) == pytest.approx(fspl_const(2e9), abs=1e-12)


def test_mean_path_loss_examples():
    flat = EnvironmentProfile(a=9.6117, b=0.739, nu_los=5, nu_nlos=5)
    for theta in (0.1, 0.7, math.pi / 2):
        assert mean_path_loss(flat, LINK, 300.0, theta) == pytest.approx(LINK.free_space_const_db + 20 * math.log10(300) + 5)
    overhead = mean_path_loss(URBAN, LINK, 200.0, math.pi / 2)
    assert abs(overhead - (LINK.free_space_const_db + 20 * math.log10(200) + URBAN.nu_los)) <= 1e-9
    d = np.linspace(10, 5000, 100)
    assert np.all(np.diff(mean_path_loss(URBAN, LINK, d, 0.4)) > 0)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from(sorted(PRESETS)), st.floats(1, 1e5), st.floats(1e-4, math.pi / 2))
def test_mean_path_loss_is_convex_mixture(name, d, theta):
    env = PRESETS[name]
    base = LINK.free_space_const_db + 20 * math.log10(d)
    loss = float(mean_path_loss(env, LINK, d, theta))
    assert base + env.nu_los - 1e-9 <= loss <= base + env.nu_nlos + 1e-9


def test_received_power():
    assert received_power_uav(CFG, 120.0) == -100.0
    assert link_ok(CFG, 120.0)
    assert received_power_uav(CFG, 0.0) == CFG.p_c
    assert not link_ok(CFG, 121.0)


def test_excess_loss_examples():
    assert excess_loss_f(URBAN, math.pi / 2) == pytest.approx(1.0, abs=1e-6)
    flat = EnvironmentProfile(a=3, b=0.2, nu_los=4, nu_nlos=4)
    assert excess_loss_f(flat, 0.3) == pytest.approx(4 - 20 * math.log10(math.sin(0.3)))
    vals = excess_loss_f(URBAN, np.linspace(1e-4, math.pi / 2, 100_000))
    assert np.all(np.diff(vals) < 0)


def test_coverage_radius_matches_budget():
    r = coverage_radius(URBAN, CFG, 200.0)
    d = math.hypot(r, 200.0)
    loss = float(mean_path_loss(URBAN, LINK, d, math.atan2(200.0, r)))
    assert loss == pytest.approx(120.0, abs=0.01)
    oracle = grid_coverage_radius(URBAN.a, URBAN.b, URBAN.nu_los, URBAN.nu_nlos, 200.0, 120.0, 2e9)
    assert abs(r - oracle) <= 0.5


def test_coverage_angle_residual():
    z = 350.0
    theta = coverage_angle(URBAN, CFG, z)
    target = CFG.p_c - CFG.p_th - 20 * math.log10(z) - free_space_loss(CFG.f_c)
    assert abs(float(excess_loss_f(URBAN, theta)) - target) <= 1e-6


def test_no_coverage_and_boundary():
    ceiling = max_service_altitude(URBAN, CFG)
    with pytest.raises(NoCoverage):
        coverage_radius(URBAN, CFG, ceiling.altitude * 1.01)
    # altitude where the overhead loss uses the whole budget exactly
    z0 = 10 ** ((120.0 - free_space_loss(2e9) - float(excess_loss_f(URBAN, math.pi / 2))) / 20)
    assert coverage_radius(URBAN, CFG, z0) <= 1e-3
    with pytest.raises(ValueError):
        coverage_radius(URBAN, CFG, 0.0)


@pytest.mark.parametrize("name", sorted(PRESETS))
@pytest.mark.parametrize("z", [60.0, 200.0, 1000.0, 4000.0])
def test_coverage_edge_power(name, z):
    env = PRESETS[name]
    try:
        r = coverage_radius(env, CFG, z)
    except NoCoverage:
        pytest.skip("no coverage at this altitude")
    assert received_power_at(env, CFG, r, z) == pytest.approx(CFG.p_th, abs=0.02)
    assert received_power_at(env, CFG, 1.01 * r + 1e-6, z) < CFG.p_th


def test_max_service_altitude():
    ceiling = max_service_altitude(URBAN, CFG)
    assert not ceiling.capped
    closed = 10 ** ((120.0 - free_space_loss(2e9) - float(excess_loss_f(URBAN, math.pi / 2))) / 20)
    assert 20 * math.log10(ceiling.altitude) == pytest.approx(20 * math.log10(closed), abs=0.01)
    assert coverage_radius(URBAN, CFG, ceiling.altitude) <= 1.0
    huge = RadioConfig(p_c=400.0)
    capped = max_service_altitude(URBAN, huge, z_cap=5e4)
    assert capped.capped and capped.altitude == 5e4


def test_less_urban_reaches_higher():
    order = ["suburban", "urban", "dense_urban", "high_rise"]
    heights = [max_service_altitude(get_profile(n), CFG).altitude for n in order]
    assert heights == sorted(heights, reverse=True)


def test_profile_registry(tmp_path):
    assert set(PRESETS) == {"suburban", "urban", "dense_urban", "high_rise"}
    assert (URBAN.a, URBAN.b) == (9.6117, 0.739)
    path = tmp_path / "reg.json"
    path.write_text('{"rural": {"a": 1.0, "b": 0.5, "nu_los": 0.0, "nu_nlos": 10.0}}')
    reg = load_profiles(path)
    assert reg["rural"].name == "rural" and reg["rural"].nu_nlos == 10.0
    with pytest.raises(KeyError):
        get_profile("lunar")
