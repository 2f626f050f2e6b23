"""Readers for the planner's output files.

These parse exactly the documented formats (stats CSV `criteria,fraction`,
sites CSV, regions GeoJSON) and nothing else; malformed input fails with the
offending line number instead of producing an empty or misleading chart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class ChartInputError(ValueError):
    """Unusable input file; message carries file and line context."""


@dataclass(frozen=True)
class StatsRow:
    criteria: str
    fraction: float


@dataclass(frozen=True)
class Site:
    gw_id: int
    lat: float
    lon: float
    region_id: int


@dataclass(frozen=True)
class Region:
    region_id: int
    points: list  # (lon, lat) pairs


def read_stats_csv(path) -> list[StatsRow]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "criteria,fraction":
        raise ChartInputError(f"{path}:1: expected header 'criteria,fraction'")
    rows = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ChartInputError(f"{path}:{n}: expected 2 columns, got {len(parts)}")
        name, raw = parts
        try:
            fraction = float(raw)
        except ValueError:
            raise ChartInputError(
                f"{path}:{n}: fraction {raw!r} is not a number"
            ) from None
        rows.append(StatsRow(name, fraction))
    if not rows:
        raise ChartInputError(f"{path}: no data rows")
    return rows


def read_sites_csv(path) -> list[Site]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ChartInputError(f"{path}: empty file")
    header = lines[0].split(",")
    required = ("gw_id", "lat", "lon", "region_id")
    try:
        cols = {name: header.index(name) for name in required}
    except ValueError as exc:
        raise ChartInputError(f"{path}:1: missing column in header: {exc}") from None
    sites = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise ChartInputError(
                f"{path}:{n}: expected {len(header)} columns, got {len(parts)}"
            )
        try:
            sites.append(
                Site(
                    gw_id=int(parts[cols["gw_id"]]),
                    lat=float(parts[cols["lat"]]),
                    lon=float(parts[cols["lon"]]),
                    region_id=int(parts[cols["region_id"]]),
                )
            )
        except ValueError as exc:
            raise ChartInputError(f"{path}:{n}: {exc}") from None
    return sites


def read_regions_geojson(path) -> list[Region]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChartInputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if doc.get("type") != "FeatureCollection":
        raise ChartInputError(f"{path}: not a GeoJSON FeatureCollection")
    regions = []
    for k, feature in enumerate(doc.get("features", [])):
        geometry = feature.get("geometry", {})
        if geometry.get("type") != "MultiPoint":
            raise ChartInputError(
                f"{path}: feature {k}: expected MultiPoint geometry"
            )
        props = feature.get("properties", {})
        regions.append(
            Region(
                region_id=int(props.get("region_id", k)),
                points=[(float(lon), float(lat)) for lon, lat in geometry["coordinates"]],
            )
        )
    return regions
