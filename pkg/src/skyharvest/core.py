"""Geometry primitives, scenario/config types and seeded generation."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SPEED_OF_LIGHT = 3.0e8  # m/s


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"Point3.{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def at_altitude(self, z: float) -> "Point3":
        return Point3(self.x, self.y, z)

    @classmethod
    def from_seq(cls, seq: Sequence[float]) -> "Point3":
        if len(seq) == 2:
            return cls(seq[0], seq[1], 0.0)
        x, y, z = seq
        return cls(x, y, z)


def distance(p: Point3, q: Point3) -> float:
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2)


def elevation_angle(ch_ground: Point3, uav: Point3) -> float:
    """Elevation angle (rad) of ``uav`` seen from ``ch_ground``."""
    dz = uav.z - ch_ground.z
    if dz <= 0:
        raise ValueError("UAV must be strictly above the cluster head")
    horizontal = math.hypot(uav.x - ch_ground.x, uav.y - ch_ground.y)
    if horizontal == 0.0:
        return math.pi / 2
    return math.atan2(dz, horizontal)


def xy_array(points: Iterable[Point3] | np.ndarray) -> np.ndarray:
    """Stack ground coordinates of ``points`` into an (n, 2) float array."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise ValueError("expected an (n, 2) or (n, 3) array")
        return arr[:, :2].copy()
    pts = list(points)
    if not pts:
        return np.zeros((0, 2))
    return np.array([[p.x, p.y] for p in pts], dtype=float)


def derive_seed(base_seed: int, *keys: int) -> int:
    """Derive an independent 64-bit seed from ``base_seed`` and integer keys.

    Uses numpy's SeedSequence hashing so (base, keys) pairs map to
    well-separated streams.
    """
    entropy = [int(base_seed)] + [int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    """The single RNG used everywhere: numpy PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class EnvironmentProfile:
    a: float
    b: float
    nu_los: float
    nu_nlos: float
    name: str = "custom"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("environment constants a and b must be positive")
        if not (0 <= self.nu_los <= self.nu_nlos):
            raise ValueError("need 0 <= nu_los <= nu_nlos")


@dataclass(frozen=True)
class RadioConfig:
    """Radio parameters. ``gamma_th`` and ``snr_budget`` are linear ratios."""

    gamma_th: float = 1e-4
    snr_budget: float = 1700.0**2 * 1e-4
    alpha: float = 2.0
    p_c: float = 20.0  # dBm
    p_th: float = -100.0  # dBm
    f_c: float = 2.0e9  # Hz

    def __post_init__(self):
        if self.gamma_th <= 0 or self.snr_budget <= 0:
            raise ValueError("gamma_th and snr_budget must be positive")
        if not 2.0 <= self.alpha <= 5.0:
            raise ValueError("alpha must lie in [2, 5]")
        if self.p_c <= self.p_th:
            raise ValueError("p_c must exceed p_th")
        if self.f_c <= 0:
            raise ValueError("f_c must be positive")

    @classmethod
    def for_sensor_range(cls, d_th: float, alpha: float = 2.0, gamma_th: float = 1e-4, **kw) -> "RadioConfig":
        """Build a config whose sensor range equals ``d_th``."""
        return cls(gamma_th=gamma_th, snr_budget=d_th**alpha * gamma_th, alpha=alpha, **kw)


@dataclass(frozen=True)
class Scenario:
    area_width: float
    area_height: float
    sensors: tuple[Point3, ...]
    dock: Point3
    max_chs: int
    max_uavs: int
    uav_altitude: float = 200.0
    uav_speed: float = 10.0
    seed: int = 0
    _xy: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(self.sensors))
        if self.area_width <= 0 or self.area_height <= 0:
            raise ValueError("area must have positive width and height")
        if self.max_chs < 1 or self.max_uavs < 1:
            raise ValueError("max_chs and max_uavs must be >= 1")
        if self.uav_altitude <= 0 or self.uav_speed <= 0:
            raise ValueError("uav_altitude and uav_speed must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        for p in self.sensors + (self.dock,):
            if not (0 <= p.x <= self.area_width and 0 <= p.y <= self.area_height):
                raise ValueError(f"point {p} lies outside the area")
        xy = xy_array(self.sensors)
        xy.setflags(write=False)
        object.__setattr__(self, "_xy", xy)

    @property
    def sensor_xy(self) -> np.ndarray:
        return self._xy

    @property
    def n_sensors(self) -> int:
        return len(self.sensors)

    def to_dict(self) -> dict:
        return {
            "area_width": self.area_width,
            "area_height": self.area_height,
            "sensors": [list(p.as_tuple()) for p in self.sensors],
            "dock": list(self.dock.as_tuple()),
            "max_chs": self.max_chs,
            "max_uavs": self.max_uavs,
            "uav_altitude": self.uav_altitude,
            "uav_speed": self.uav_speed,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(
            area_width=float(data["area_width"]),
            area_height=float(data["area_height"]),
            sensors=tuple(Point3.from_seq(p) for p in data["sensors"]),
            dock=Point3.from_seq(data["dock"]),
            max_chs=int(data["max_chs"]),
            max_uavs=int(data["max_uavs"]),
            uav_altitude=float(data.get("uav_altitude", 200.0)),
            uav_speed=float(data.get("uav_speed", 10.0)),
            seed=int(data.get("seed", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_json(Path(path).read_text())


def generate_scenario(
    seed: int,
    n_sensors: int = 500,
    area_width: float = 10_000.0,
    area_height: float = 10_000.0,
    dock: Point3 | None = None,
    max_chs: int | None = None,
    max_uavs: int = 3,
    uav_altitude: float = 200.0,
    uav_speed: float = 10.0,
) -> Scenario:
    """Scatter ``n_sensors`` uniformly over the rectangle.

    The dock defaults to the area center and the CH budget to one CH per
    sensor (no effective cap).
    """
    if n_sensors < 1:
        raise ValueError("n_sensors must be >= 1")
    if area_width <= 0 or area_height <= 0:
        raise ValueError("zero-area rectangle")
    rng = make_rng(seed)
    xy = rng.uniform(0.0, 1.0, size=(n_sensors, 2)) * [area_width, area_height]
    sensors = tuple(Point3(x, y, 0.0) for x, y in xy)
    if dock is None:
        dock = Point3(area_width / 2, area_height / 2, 0.0)
    return Scenario(
        area_width=area_width,
        area_height=area_height,
        sensors=sensors,
        dock=dock,
        max_chs=n_sensors if max_chs is None else max_chs,
        max_uavs=max_uavs,
        uav_altitude=uav_altitude,
        uav_speed=uav_speed,
        seed=seed,
    )


def config_to_dict(obj) -> dict:
    return asdict(obj)
