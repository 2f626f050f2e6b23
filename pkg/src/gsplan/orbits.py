"""Circular Walker constellation propagation and visibility grids.

Geometry is deliberately simple: spherical Earth, circular Keplerian orbits,
no perturbations. Satellites advance in the inertial frame and are rotated
into the Earth-fixed frame by the sidereal rate, with both frames coincident
at t = 0. That is enough to answer the only two questions the planner asks of
the constellation: how many satellites a ground cell sees above the elevation
floor, and how often it sees at least one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geogrid import GridSpec, ScalarGrid, wrap_lon

R_EARTH_M = 6378.137e3
MU_EARTH = 3.986004418e14        # m^3/s^2
OMEGA_EARTH = 7.2921159e-5       # rad/s


@dataclass(frozen=True)
class WalkerConstellation:
    """Walker-delta shell: planes evenly spread in RAAN, slots phased between planes.

    A zero-satellite constellation is permitted as the degenerate empty shell.
    """

    altitude_km: float
    inclination_deg: float
    n_planes: int
    sats_per_plane: int
    phasing_factor: int = 0
    raan_spread_deg: float = 360.0

    def __post_init__(self) -> None:
        if self.altitude_km <= 0:
            raise ValueError("altitude must be positive")
        if not (0.0 <= self.inclination_deg <= 180.0):
            raise ValueError("inclination must lie in [0, 180]")
        if self.n_planes < 0 or self.sats_per_plane < 0:
            raise ValueError("plane and slot counts cannot be negative")
        if self.n_planes > 0 and not (0 <= self.phasing_factor < self.n_planes):
            raise ValueError("phasing factor must lie in [0, n_planes)")

    @property
    def n_sats(self) -> int:
        return self.n_planes * self.sats_per_plane

    @property
    def semi_major_axis_m(self) -> float:
        return R_EARTH_M + self.altitude_km * 1e3

    @property
    def orbital_period_s(self) -> float:
        a = self.semi_major_axis_m
        return 2.0 * math.pi * math.sqrt(a**3 / MU_EARTH)


@dataclass(frozen=True)
class SatState:
    sat_id: int
    position_ecef: np.ndarray  # meters, shape (3,)
    epoch_s: float


@dataclass(frozen=True)
class GeodeticPoint:
    lat: float
    lon: float
    alt_m: float = 0.0

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        object.__setattr__(self, "lon", wrap_lon(self.lon))


@dataclass(frozen=True)
class VisibilityConfig:
    """Sampling plan: t = 0, step_s, ... up to and including window_s.

    A step larger than the window degenerates to the single t = 0 snapshot.
    """

    min_elevation_deg: float
    window_s: float
    step_s: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.min_elevation_deg < 90.0):
            raise ValueError("minimum elevation must lie in [0, 90)")
        if self.window_s <= 0:
            raise ValueError("window must be positive")
        if self.step_s <= 0:
            raise ValueError("step must be positive")

    @property
    def sample_times(self) -> np.ndarray:
        n = int(math.floor(self.window_s / self.step_s)) + 1
        return np.arange(n) * self.step_s


def _positions_ecef(constellation: WalkerConstellation, t: float) -> np.ndarray:
    """Earth-fixed positions of every satellite at time t, shape (n_sats, 3)."""
    c = constellation
    if c.n_sats == 0:
        return np.zeros((0, 3))
    a = c.semi_major_axis_m
    n_motion = math.sqrt(MU_EARTH / a**3)
    inc = math.radians(c.inclination_deg)

    planes = np.repeat(np.arange(c.n_planes), c.sats_per_plane)
    slots = np.tile(np.arange(c.sats_per_plane), c.n_planes)
    raan = np.radians(planes * (c.raan_spread_deg / c.n_planes))
    u0 = np.radians(
        slots * (360.0 / c.sats_per_plane)
        + planes * (c.phasing_factor * 360.0 / c.n_sats)
    )
    u = u0 + n_motion * t

    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    cos_i, sin_i = math.cos(inc), math.sin(inc)

    # perifocal -> inertial: Rz(raan) @ Rx(inc) applied to (a cos u, a sin u, 0)
    x_i = a * (cos_o * cos_u - sin_o * cos_i * sin_u)
    y_i = a * (sin_o * cos_u + cos_o * cos_i * sin_u)
    z_i = a * (sin_i * sin_u)

    # inertial -> Earth-fixed: rotate by -omega_E * t about z
    theta = OMEGA_EARTH * t
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    x = cos_t * x_i + sin_t * y_i
    y = -sin_t * x_i + cos_t * y_i
    return np.column_stack([x, y, z_i])


def propagate(constellation: WalkerConstellation, t: float) -> list[SatState]:
    """All satellite states at time t since simulation start."""
    if t < 0:
        raise ValueError("time must be non-negative")
    pos = _positions_ecef(constellation, t)
    return [SatState(i, pos[i], t) for i in range(pos.shape[0])]


def geodetic_of(position_ecef: np.ndarray) -> GeodeticPoint:
    """Spherical-Earth subsatellite point of an ECEF position."""
    x, y, z = (float(v) for v in position_ecef)
    r = math.sqrt(x * x + y * y + z * z)
    lat = math.degrees(math.asin(z / r))
    lon = math.degrees(math.atan2(y, x))
    return GeodeticPoint(lat, wrap_lon(lon), r - R_EARTH_M)


def observer_ecef(observer: GeodeticPoint) -> np.ndarray:
    lat = math.radians(observer.lat)
    lon = math.radians(observer.lon)
    r = R_EARTH_M + observer.alt_m
    return np.array([
        r * math.cos(lat) * math.cos(lon),
        r * math.cos(lat) * math.sin(lon),
        r * math.sin(lat),
    ])


def elevation_angle(observer: GeodeticPoint, sat: SatState) -> float:
    """Angle of the line of sight above the observer's horizontal plane, degrees."""
    obs = observer_ecef(observer)
    sight = np.asarray(sat.position_ecef, dtype=np.float64) - obs
    up = obs / np.linalg.norm(obs)
    sin_el = float(np.dot(sight, up) / np.linalg.norm(sight))
    return math.degrees(math.asin(max(-1.0, min(1.0, sin_el))))


def _horizon_angle_deg(orbit_radius_m: float) -> float:
    """Earth central angle beyond which a satellite is below the horizon."""
    return math.degrees(math.acos(R_EARTH_M / orbit_radius_m))


def coverage_central_angle_deg(altitude_km: float, min_elevation_deg: float) -> float:
    """Closed-form cap radius: lambda = acos(R/(R+h) cos eps) - eps."""
    ratio = R_EARTH_M / (R_EARTH_M + altitude_km * 1e3)
    eps = math.radians(min_elevation_deg)
    return math.degrees(math.acos(ratio * math.cos(eps))) - min_elevation_deg


def _count_visible_one_sample(
    sat_pos: np.ndarray,
    unit_cells: np.ndarray,
    lat_centers: np.ndarray,
    sin_min_el: float,
) -> np.ndarray:
    """Satellites at elevation >= floor per cell, one time sample.

    Works row-banded: cells whose central angle to the subsatellite point
    exceeds the horizon angle see the satellite below 0 degrees elevation,
    so only rows within the horizon band need the exact line-of-sight test.
    The test itself is the elevation formula, not the coverage-circle bound:
    sin(el) = (p.u - R) / |p - R u| for observers on the sphere surface.
    """
    n_lat, n_lon = unit_cells.shape[:2]
    counts = np.zeros((n_lat, n_lon), dtype=np.int32)
    for p in sat_pos:
        r_s = math.sqrt(float(p @ p))
        band = _horizon_angle_deg(r_s) + 1e-9
        sub_lat = math.degrees(math.asin(float(p[2]) / r_s))
        rows = np.nonzero(np.abs(lat_centers - sub_lat) <= band)[0]
        if rows.size == 0:
            continue
        i0, i1 = rows[0], rows[-1] + 1
        dots = unit_cells[i0:i1].reshape(-1, 3) @ p
        dist = np.sqrt(r_s * r_s - 2.0 * R_EARTH_M * dots + R_EARTH_M * R_EARTH_M)
        sin_el = (dots - R_EARTH_M) / dist
        counts[i0:i1] += (sin_el >= sin_min_el).reshape(i1 - i0, n_lon)
    return counts


def _cell_unit_vectors(spec: GridSpec) -> np.ndarray:
    lat = np.radians(spec.lat_centers())[:, None]
    lon = np.radians(spec.lon_centers())[None, :]
    out = np.empty((spec.n_lat, spec.n_lon, 3))
    cos_lat = np.cos(lat)
    out[:, :, 0] = cos_lat * np.cos(lon)
    out[:, :, 1] = cos_lat * np.sin(lon)
    out[:, :, 2] = np.broadcast_to(np.sin(lat), (spec.n_lat, spec.n_lon))
    return out


def _worker_count() -> int:
    raw = os.environ.get("GSPLAN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GSPLAN_THREADS must be an integer, got {raw!r}") from None
    if n == 0:
        return min(os.cpu_count() or 1, 8)
    return max(1, n)


def visibility_grids(
    constellation: WalkerConstellation,
    spec: GridSpec,
    cfg: VisibilityConfig,
) -> tuple[ScalarGrid, ScalarGrid]:
    """Average visible-satellite count and seen-at-least-one time fraction.

    Observers sit at the cell centers at altitude 0. Counting is exact
    integer arithmetic per sample, so the result is independent of how the
    sample loop is scheduled.
    """
    times = cfg.sample_times
    unit_cells = _cell_unit_vectors(spec)
    lat_centers = spec.lat_centers()
    sin_min_el = math.sin(math.radians(cfg.min_elevation_deg))

    def one(t: float) -> tuple[np.ndarray, np.ndarray]:
        pos = _positions_ecef(constellation, float(t))
        counts = _count_visible_one_sample(pos, unit_cells, lat_centers, sin_min_el)
        return counts, counts > 0

    total = np.zeros((spec.n_lat, spec.n_lon), dtype=np.int64)
    seen = np.zeros((spec.n_lat, spec.n_lon), dtype=np.int64)
    workers = _worker_count()
    if workers == 1:
        results = map(one, times)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(one, times)
    for counts, any_seen in results:
        total += counts
        seen += any_seen
    if workers != 1:
        pool.shutdown()

    avg = ScalarGrid(spec, total / len(times), "count")
    frac = ScalarGrid(spec, seen / len(times), "fraction")
    return avg, frac


def avg_visible_grid(
    constellation: WalkerConstellation, spec: GridSpec, cfg: VisibilityConfig
) -> ScalarGrid:
    """Time-averaged count of satellites above the elevation floor per cell."""
    return visibility_grids(constellation, spec, cfg)[0]


def visibility_fraction_grid(
    constellation: WalkerConstellation, spec: GridSpec, cfg: VisibilityConfig
) -> ScalarGrid:
    """Fraction of time samples with at least one satellite visible per cell."""
    return visibility_grids(constellation, spec, cfg)[1]


def export_snapshot_csv(states: list[SatState], path) -> None:
    """Write satellite states as `sat_id,epoch_s,x_m,y_m,z_m`."""
    lines = ["sat_id,epoch_s,x_m,y_m,z_m"]
    for s in states:
        x, y, z = (repr(float(v)) for v in s.position_ecef)
        lines.append(f"{s.sat_id},{repr(float(s.epoch_s))},{x},{y},{z}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
