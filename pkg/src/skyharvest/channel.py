"""Air-to-ground and sensor-to-CH propagation.

Angles are radians at the interface; the LoS sigmoid constants ``a`` and
``b`` are calibrated for elevation in degrees, so the conversion happens
inside the sigmoid only.  All logarithms are base 10.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from skyharvest.core import SPEED_OF_LIGHT, EnvironmentProfile, RadioConfig

HALF_PI = math.pi / 2
# |f(pi/2) - target| below this counts as the overhead-only boundary
_BOUNDARY_TOL_DB = 1e-9


class NoCoverage(ValueError):
    """Link budget cannot be met even directly above the cluster head."""


@dataclass(frozen=True)
class LinkBudget:
    budget_db: float
    free_space_const_db: float

    def __post_init__(self):
        if self.budget_db <= 0:
            raise ValueError("link budget must be positive")

    @classmethod
    def from_radio(cls, cfg: RadioConfig) -> "LinkBudget":
        return cls(cfg.p_c - cfg.p_th, free_space_loss(cfg.f_c))


def load_profiles(path: str | Path | None = None) -> dict[str, EnvironmentProfile]:
    """Read an environment registry (name -> {a, b, nu_los, nu_nlos})."""
    if path is None:
        text = resources.files("skyharvest").joinpath("profiles.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    return {
        name: EnvironmentProfile(
            a=float(v["a"]), b=float(v["b"]),
            nu_los=float(v["nu_los"]), nu_nlos=float(v["nu_nlos"]), name=name,
        )
        for name, v in raw.items()
    }


PRESETS = load_profiles()
URBAN = PRESETS["urban"]
SUBURBAN = PRESETS["suburban"]


def get_profile(name: str) -> EnvironmentProfile:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown environment {name!r}; choose from {sorted(PRESETS)}") from None


def snr_at_clusterhead(cfg: RadioConfig, d: float) -> float:
    if d <= 0:
        raise ValueError("distance must be positive")
    return cfg.snr_budget * d ** (-cfg.alpha)


def max_sensor_range(cfg: RadioConfig) -> float:
    return (cfg.snr_budget / cfg.gamma_th) ** (1.0 / cfg.alpha)


def _check_theta(theta) -> None:
    t = np.asarray(theta)
    if np.any(~(t > 0)) or np.any(t > HALF_PI):
        raise ValueError("elevation angle must lie in (0, pi/2]")


def _sigmoid_term(env: EnvironmentProfile, theta):
    return env.a * np.exp(-env.b * (np.degrees(theta) - env.a))


def los_probability(env: EnvironmentProfile, theta):
    _check_theta(theta)
    return 1.0 / (1.0 + _sigmoid_term(env, theta))


def free_space_loss(f_c: float) -> float:
    if f_c <= 0:
        raise ValueError("carrier frequency must be positive")
    return 20.0 * math.log10(4.0 * math.pi * f_c / SPEED_OF_LIGHT)


def mean_path_loss(env: EnvironmentProfile, link: LinkBudget, d, theta):
    """Probability-weighted mix of LoS and NLoS loss (dB)."""
    if np.any(np.asarray(d) <= 0):
        raise ValueError("distance must be positive")
    p_los = los_probability(env, theta)
    base = link.free_space_const_db + 20.0 * np.log10(d)
    return p_los * (base + env.nu_los) + (1.0 - p_los) * (base + env.nu_nlos)


def received_power_uav(cfg: RadioConfig, loss):
    return cfg.p_c - loss


def link_ok(cfg: RadioConfig, loss) -> bool:
    return bool(received_power_uav(cfg, loss) >= cfg.p_th)


def received_power_at(env: EnvironmentProfile, cfg: RadioConfig, horizontal: float, z: float) -> float:
    """Received power (dBm) at altitude ``z`` and ground offset ``horizontal``."""
    if z <= 0:
        raise ValueError("altitude must be positive")
    d = math.hypot(horizontal, z)
    theta = HALF_PI if horizontal == 0 else math.atan2(z, horizontal)
    return float(received_power_uav(cfg, mean_path_loss(env, LinkBudget.from_radio(cfg), d, theta)))


def excess_loss_f(env: EnvironmentProfile, theta):
    """Elevation-dependent part of the mean loss once 20log10(z) is factored out."""
    _check_theta(theta)
    s = _sigmoid_term(env, theta)
    mix = (env.nu_los + env.nu_nlos * s) / (1.0 + s)
    return mix - 20.0 * np.log10(np.sin(theta))


def _target_db(cfg: RadioConfig, z: float) -> float:
    return cfg.p_c - cfg.p_th - 20.0 * math.log10(z) - free_space_loss(cfg.f_c)


def coverage_angle(env: EnvironmentProfile, cfg: RadioConfig, z: float) -> float:
    """Elevation angle at the edge of a CH's aerial coverage disc at altitude ``z``.

    Raises NoCoverage when even the overhead position fails the budget.
    """
    if z <= 0:
        raise ValueError("altitude must be positive")
    target = _target_db(cfg, z)
    top = float(excess_loss_f(env, HALF_PI)) - target
    if abs(top) <= _BOUNDARY_TOL_DB:
        return HALF_PI

    grid = np.linspace(HALF_PI / 1024, HALF_PI, 1024)
    vals = excess_loss_f(env, grid)
    if not np.all(np.diff(vals) <= 0):
        # not monotone: settle for the best grid point
        if target < vals.min():
            raise NoCoverage(f"no coverage at z={z:g} m")
        return float(grid[np.argmin(np.abs(vals - target))])
    if top > 0:
        raise NoCoverage(f"no coverage at z={z:g} m (budget short by {top:.3f} dB overhead)")

    lo, hi = 1e-9, HALF_PI
    while float(excess_loss_f(env, lo)) <= target:
        if lo < 1e-300:
            return lo
        lo *= 1e-3
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if float(excess_loss_f(env, mid)) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def coverage_radius(env: EnvironmentProfile, cfg: RadioConfig, z: float) -> float:
    """Largest horizontal offset (m) at altitude ``z`` keeping received power >= p_th."""
    theta = coverage_angle(env, cfg, z)
    if theta == HALF_PI:
        return 0.0
    return z / math.tan(theta)


class ServiceCeiling(NamedTuple):
    altitude: float
    capped: bool


def max_service_altitude(env: EnvironmentProfile, cfg: RadioConfig, z_cap: float = 1.0e5) -> ServiceCeiling:
    """Highest altitude at which hovering straight above a CH still closes the link.

    Found by bisection on z.  ``capped`` is set when the link still closes
    at ``z_cap``.
    """
    overhead = float(excess_loss_f(env, HALF_PI))

    def feasible(z: float) -> bool:
        return _target_db(cfg, z) - overhead >= -_BOUNDARY_TOL_DB

    if feasible(z_cap):
        return ServiceCeiling(z_cap, True)
    lo, hi = 1e-3, z_cap
    if not feasible(lo):
        return ServiceCeiling(0.0, False)
    while hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return ServiceCeiling(lo, False)
