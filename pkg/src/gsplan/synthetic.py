"""Deterministic synthetic rasters for demos, fixtures and the case study.

Smooth trigonometric fields stand in for real climate, census and elevation
data. They are functions of the cell center only, so any two grids agree
wherever their cell centers coincide, and regeneration is exactly
reproducible. `python -m gsplan.synthetic DIR --step 1` writes a ready-to-run
workspace (three rasters plus a case-study config).
"""

from __future__ import annotations

import argparse
import os

import numpy as np

from .esri_ascii import write_ascii_grid
from .geogrid import GridSpec, ScalarGrid


def _mesh(spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    lat = np.radians(spec.lat_centers())[:, None]
    lon = np.radians(spec.lon_centers())[None, :]
    return lat, lon


def synth_rain_map(spec: GridSpec) -> ScalarGrid:
    """R_0.01 field, heaviest in a wavy tropical belt, 0-120 mm/h."""
    lat, lon = _mesh(spec)
    belt = np.exp(-((np.degrees(lat) - 8.0 * np.sin(2.0 * lon)) / 18.0) ** 2)
    texture = 0.5 + 0.5 * np.sin(3.0 * lon + 1.0) * np.cos(2.0 * lat + 0.5)
    return ScalarGrid(spec, 120.0 * belt * texture + 0.0 * lon, "mm/h")


def synth_population(spec: GridSpec) -> ScalarGrid:
    """Population density with a handful of metropolitan hotspots."""
    lat, lon = _mesh(spec)
    hotspots = [
        (40.7, -74.0, 9000.0), (51.5, -0.1, 8000.0), (35.7, 139.7, 11000.0),
        (28.6, 77.2, 12000.0), (-23.5, -46.6, 7000.0), (30.0, 31.2, 9000.0),
        (-33.9, 151.2, 4000.0), (19.4, -99.1, 8000.0), (55.8, 37.6, 6000.0),
        (6.5, 3.4, 10000.0),
    ]
    dens = 5.0 * (1.0 + np.cos(lat)) + 0.0 * lon
    for hlat, hlon, peak in hotspots:
        d2 = (np.degrees(lat) - hlat) ** 2 + (np.degrees(lon) - hlon) ** 2
        dens = dens + peak * np.exp(-d2 / 18.0)
    return ScalarGrid(spec, dens, "persons/km2")


def synth_terrain(spec: GridSpec) -> ScalarGrid:
    """Elevation field with synthetic continents; deep basins become NODATA."""
    lat, lon = _mesh(spec)
    elev = 2500.0 * np.sin(2.2 * lon + 0.8) * np.cos(1.7 * lat) + 800.0 * np.cos(
        5.0 * lon
    ) * np.sin(3.0 * lat + 0.3) - 300.0
    elev = np.where(elev < -1500.0, np.nan, elev)
    return ScalarGrid(spec, elev, "m")


CASE_STUDY_TOML = """\
# Case-study configuration: 800 km shell, 10 deg elevation floor,
# Ka/Q/V feeder frequencies, thresholds 25% / 3 sats / 33 Mbps/km2.
[grid]
lat_min = -90.0
lat_max = 90.0
lon_min = -180.0
lon_max = 180.0
step_lat = {step}
step_lon = {step}

[constellation]
altitude_km = 800.0
inclination_deg = 53.0
n_planes = {n_planes}
sats_per_plane = {sats_per_plane}
phasing_factor = 1

[visibility]
min_elevation_deg = 10.0
step_s = {step_s}
min_visible_sats = 3.0

[weather]
rain_map = "rain.asc"
frequencies_ghz = [19.7, 30.0, 40.5, 47.2]
polarization_tilt_deg = 45.0
rain_height_km = 5.0
rain_max_fraction = 0.25

[traffic]
population_map = "population.asc"
throughput_per_user_mbps = 10.0
penetration_rate = 0.01
concurrency_rate = 0.33
traffic_min_mbps_km2 = 33.0

[masks]
terrain_map = "terrain.asc"
geopolitical_mode = "random"
geopolitical_seed = 42
geopolitical_blocked_fraction = 0.1

[output]
directory = "out"
emit = ["report", "csv", "geojson"]
"""


def write_workspace(
    directory,
    step_deg: float = 1.0,
    step_s: float = 60.0,
    n_planes: int = 8,
    sats_per_plane: int = 8,
) -> str:
    """Write rasters and a case-study config; returns the config path.

    The default 8x8 shell matches the desk-scale fixture. At 800 km and a
    10 degree floor, 64 satellites average under 3 visible everywhere, so
    the visibility criterion then rejects every cell; pass a denser shell
    (16x16 or more) to see the pipeline select sites.
    """
    os.makedirs(directory, exist_ok=True)
    spec = GridSpec(-90.0, 90.0, -180.0, 180.0, step_deg, step_deg)
    write_ascii_grid(synth_rain_map(spec), os.path.join(directory, "rain.asc"))
    write_ascii_grid(synth_population(spec), os.path.join(directory, "population.asc"))
    write_ascii_grid(synth_terrain(spec), os.path.join(directory, "terrain.asc"))
    config_path = os.path.join(directory, "case_study.toml")
    with open(config_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(
            CASE_STUDY_TOML.format(
                step=step_deg,
                step_s=step_s,
                n_planes=n_planes,
                sats_per_plane=sats_per_plane,
            )
        )
    return config_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m gsplan.synthetic",
        description="generate a synthetic-raster planner workspace",
    )
    parser.add_argument("directory")
    parser.add_argument("--step", type=float, default=1.0, help="grid step, degrees")
    parser.add_argument(
        "--step-s", type=float, default=60.0, help="visibility sampling step, seconds"
    )
    parser.add_argument("--planes", type=int, default=8, help="orbital planes")
    parser.add_argument(
        "--sats-per-plane", type=int, default=8, help="satellites per plane"
    )
    args = parser.parse_args(argv)
    path = write_workspace(
        args.directory, args.step, args.step_s, args.planes, args.sats_per_plane
    )
    print(f"wrote workspace with config {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
