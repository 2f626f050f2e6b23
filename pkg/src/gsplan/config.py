"""Run configuration: TOML schema, defaults, and load-time validation.

The file mirrors the planner's blocks ([grid], [constellation], [visibility],
[weather], [traffic], [masks], [thresholds], [output]). Only the three raster
paths are required; everything else has the case-study defaults. Validation
collects every failure before raising so a bad file is fixed in one pass.
Relative raster paths resolve against the config file's directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import atmos
from .demand import TrafficParams
from .errors import ConfigError
from .geogrid import GridSpec
from .orbits import VisibilityConfig, WalkerConstellation
from .planner import ThresholdConfig

EMIT_CHOICES = ("report", "csv", "geojson", "masks", "grids")


@dataclass(frozen=True)
class WeatherBlock:
    rain_map: str
    frequencies_ghz: tuple[float, ...] = (19.7, 30.0, 40.5, 47.2)
    polarization_tilt_deg: float = 45.0
    rain_height_km: float = 5.0
    coefficient_table: Optional[str] = None


@dataclass(frozen=True)
class TrafficBlock:
    population_map: str
    params: TrafficParams = field(
        default_factory=lambda: TrafficParams(10.0, 0.01, 0.33)
    )


@dataclass(frozen=True)
class MasksBlock:
    terrain_map: str
    geopolitical_mode: str = "random"
    geopolitical_seed: int = 1
    geopolitical_blocked_fraction: float = 0.1
    geopolitical_map: Optional[str] = None


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "out"
    emit: tuple[str, ...] = ("report",)


@dataclass(frozen=True)
class RunConfig:
    grid_spec: GridSpec
    constellation: WalkerConstellation
    visibility: VisibilityConfig
    thresholds: ThresholdConfig
    weather: WeatherBlock
    traffic: TrafficBlock
    masks: MasksBlock
    output: OutputBlock

    def echo(self) -> dict:
        """Fully resolved configuration for embedding in reports."""
        g, c, v, t = self.grid_spec, self.constellation, self.visibility, self.thresholds
        return {
            "grid": {
                "lat_min": g.lat_min, "lat_max": g.lat_max,
                "lon_min": g.lon_min, "lon_max": g.lon_max,
                "step_lat": g.step_lat, "step_lon": g.step_lon,
            },
            "constellation": {
                "altitude_km": c.altitude_km,
                "inclination_deg": c.inclination_deg,
                "n_planes": c.n_planes,
                "sats_per_plane": c.sats_per_plane,
                "phasing_factor": c.phasing_factor,
                "raan_spread_deg": c.raan_spread_deg,
            },
            "visibility": {
                "min_elevation_deg": v.min_elevation_deg,
                "window_s": v.window_s,
                "step_s": v.step_s,
            },
            "thresholds": {
                "rain_max_fraction": t.rain_max_fraction,
                "min_visible_sats": t.min_visible_sats,
                "traffic_min_mbps_km2": t.traffic_min_mbps_km2,
                "require_land": t.require_land,
                "require_geo_allowed": t.require_geo_allowed,
                "altitude_max_m": t.altitude_max_m,
            },
            "weather": {
                "rain_map": self.weather.rain_map,
                "frequencies_ghz": list(self.weather.frequencies_ghz),
                "polarization_tilt_deg": self.weather.polarization_tilt_deg,
                "rain_height_km": self.weather.rain_height_km,
                "coefficient_table": self.weather.coefficient_table,
            },
            "traffic": {
                "population_map": self.traffic.population_map,
                "throughput_per_user_mbps": self.traffic.params.throughput_per_user_mbps,
                "penetration_rate": self.traffic.params.penetration_rate,
                "concurrency_rate": self.traffic.params.concurrency_rate,
            },
            "masks": {
                "terrain_map": self.masks.terrain_map,
                "geopolitical_mode": self.masks.geopolitical_mode,
                "geopolitical_seed": self.masks.geopolitical_seed,
                "geopolitical_blocked_fraction": self.masks.geopolitical_blocked_fraction,
                "geopolitical_map": self.masks.geopolitical_map,
            },
            "output": {
                "directory": self.output.directory,
                "emit": list(self.output.emit),
            },
        }


_SCHEMA = {
    "grid": {"lat_min", "lat_max", "lon_min", "lon_max", "step_lat", "step_lon"},
    "constellation": {
        "altitude_km", "inclination_deg", "n_planes", "sats_per_plane",
        "phasing_factor", "raan_spread_deg",
    },
    "visibility": {"min_elevation_deg", "window_s", "step_s", "min_visible_sats"},
    "weather": {
        "rain_map", "frequencies_ghz", "polarization_tilt_deg", "rain_height_km",
        "coefficient_table", "rain_max_fraction",
    },
    "traffic": {
        "population_map", "throughput_per_user_mbps", "penetration_rate",
        "concurrency_rate", "traffic_min_mbps_km2",
    },
    "masks": {
        "terrain_map", "geopolitical_mode", "geopolitical_seed",
        "geopolitical_blocked_fraction", "geopolitical_map", "altitude_max_m",
        "require_land", "require_geo_allowed",
    },
    "output": {"directory", "emit"},
}


class _Collector:
    """Accumulates validation failures so they all surface together."""

    def __init__(self) -> None:
        self.failures: list[str] = []

    def error(self, msg: str) -> None:
        self.failures.append(msg)

    def attempt(self, what: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, TypeError) as exc:
            self.failures.append(f"{what}: {exc}")
            return None

    def raise_if_any(self, path) -> None:
        if self.failures:
            detail = "\n  - ".join(self.failures)
            raise ConfigError(f"invalid configuration {path}:\n  - {detail}")


def _check_schema(raw: dict, col: _Collector) -> None:
    for section, body in raw.items():
        if section not in _SCHEMA:
            col.error(f"unknown section [{section}]")
            continue
        if not isinstance(body, dict):
            col.error(f"section [{section}] must be a table")
            continue
        for key in body:
            if key not in _SCHEMA[section]:
                col.error(f"unknown key {section}.{key}")


def load_config(path) -> RunConfig:
    """Parse and validate a planner configuration file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc

    col = _Collector()
    _check_schema(raw, col)
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p: Optional[str]) -> Optional[str]:
        if p is None:
            return None
        return p if os.path.isabs(p) else os.path.join(base, p)

    g = raw.get("grid", {})
    spec = col.attempt(
        "grid",
        GridSpec,
        g.get("lat_min", -90.0), g.get("lat_max", 90.0),
        g.get("lon_min", -180.0), g.get("lon_max", 180.0),
        g.get("step_lat", 0.1), g.get("step_lon", 0.1),
    )

    c = raw.get("constellation", {})
    constellation = col.attempt(
        "constellation",
        WalkerConstellation,
        c.get("altitude_km", 800.0),
        c.get("inclination_deg", 53.0),
        c.get("n_planes", 8),
        c.get("sats_per_plane", 8),
        c.get("phasing_factor", 1),
        c.get("raan_spread_deg", 360.0),
    )

    v = raw.get("visibility", {})
    window = v.get("window_s")
    if window is None and constellation is not None:
        window = constellation.orbital_period_s
    visibility = col.attempt(
        "visibility",
        VisibilityConfig,
        v.get("min_elevation_deg", 10.0),
        window if window is not None else 6000.0,
        v.get("step_s", 30.0),
    )
    if visibility is not None and visibility.min_elevation_deg < atmos.MIN_ELEVATION_DEG:
        col.error(
            "visibility.min_elevation_deg: the rain model supports only "
            f"elevations >= {atmos.MIN_ELEVATION_DEG} deg"
        )

    w = raw.get("weather", {})
    m = raw.get("masks", {})
    t = raw.get("traffic", {})
    thresholds = col.attempt(
        "thresholds",
        ThresholdConfig,
        w.get("rain_max_fraction", 0.25),
        v.get("min_visible_sats", 3.0),
        t.get("traffic_min_mbps_km2", 33.0),
        m.get("require_land", True),
        m.get("require_geo_allowed", True),
        m.get("altitude_max_m"),
    )

    freqs = w.get("frequencies_ghz", [19.7, 30.0, 40.5, 47.2])
    if not isinstance(freqs, (list, tuple)) or not freqs:
        col.error("weather.frequencies_ghz must be a non-empty list")
        freqs = []
    if "rain_map" not in w:
        col.error("weather.rain_map is required (rain layer)")
    weather = WeatherBlock(
        rain_map=resolve(w.get("rain_map", "")),
        frequencies_ghz=tuple(float(f) for f in freqs),
        polarization_tilt_deg=w.get("polarization_tilt_deg", 45.0),
        rain_height_km=w.get("rain_height_km", 5.0),
        coefficient_table=resolve(w.get("coefficient_table")),
    )
    if weather.rain_height_km <= 0:
        col.error("weather.rain_height_km must be positive")

    table = None
    if weather.coefficient_table is None or os.path.exists(weather.coefficient_table):
        table = col.attempt(
            "weather.coefficient_table",
            atmos.load_coefficient_table,
            weather.coefficient_table,
        )
    else:
        col.error(
            f"weather.coefficient_table: file not found: {weather.coefficient_table}"
        )
    if table is not None:
        lo, hi = atmos.table_frequency_range(table)
        for f in weather.frequencies_ghz:
            if not (lo <= f <= hi):
                col.error(
                    f"weather.frequencies_ghz: {f} GHz outside table range [{lo}, {hi}]"
                )

    if "population_map" not in t:
        col.error("traffic.population_map is required (traffic layer)")
    params = col.attempt(
        "traffic",
        TrafficParams,
        t.get("throughput_per_user_mbps", 10.0),
        t.get("penetration_rate", 0.01),
        t.get("concurrency_rate", 0.33),
    )
    traffic = TrafficBlock(
        population_map=resolve(t.get("population_map", "")),
        params=params or TrafficParams(10.0, 0.01, 0.33),
    )

    if "terrain_map" not in m:
        col.error("masks.terrain_map is required (land layer)")
    geo_mode = m.get("geopolitical_mode", "random")
    if geo_mode not in ("random", "file"):
        col.error(f"masks.geopolitical_mode must be 'random' or 'file', got {geo_mode!r}")
    if geo_mode == "file" and "geopolitical_map" not in m:
        col.error("masks.geopolitical_map is required when geopolitical_mode = 'file'")
    seed = m.get("geopolitical_seed", 1)
    if not isinstance(seed, int) or not (0 <= seed < 2**64):
        col.error("masks.geopolitical_seed must be an unsigned 64-bit integer")
        seed = 1
    frac = m.get("geopolitical_blocked_fraction", 0.1)
    if not (isinstance(frac, (int, float)) and 0.0 <= frac <= 1.0):
        col.error("masks.geopolitical_blocked_fraction must lie in [0, 1]")
        frac = 0.1
    mask_block = MasksBlock(
        terrain_map=resolve(m.get("terrain_map", "")),
        geopolitical_mode=geo_mode,
        geopolitical_seed=seed,
        geopolitical_blocked_fraction=float(frac),
        geopolitical_map=resolve(m.get("geopolitical_map")),
    )

    o = raw.get("output", {})
    emit = o.get("emit", ["report"])
    if not isinstance(emit, (list, tuple)):
        col.error("output.emit must be a list")
        emit = ["report"]
    for e in emit:
        if e not in EMIT_CHOICES:
            col.error(f"output.emit: unknown artifact {e!r}; choose from {EMIT_CHOICES}")
    output = OutputBlock(directory=o.get("directory", "out"), emit=tuple(emit))

    # referenced rasters must exist, named by the layer they feed
    for layer, p in (
        ("rain", weather.rain_map),
        ("traffic", traffic.population_map),
        ("land", mask_block.terrain_map),
    ):
        if p and not os.path.exists(p):
            col.error(f"{layer} layer: raster not found: {p}")
    if mask_block.geopolitical_mode == "file" and mask_block.geopolitical_map:
        if not os.path.exists(mask_block.geopolitical_map):
            col.error(
                f"geopolitical layer: raster not found: {mask_block.geopolitical_map}"
            )

    col.raise_if_any(path)
    return RunConfig(
        grid_spec=spec,
        constellation=constellation,
        visibility=visibility,
        thresholds=thresholds,
        weather=weather,
        traffic=traffic,
        masks=mask_block,
        output=output,
    )
