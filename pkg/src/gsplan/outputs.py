"""Artifact writers: report JSON, sites CSV, stats CSV, GeoJSON, raster dumps.

Floats are written with Python's shortest round-trip representation and all
orderings are fixed by construction, so rerunning an identical configuration
reproduces every artifact byte for byte.
"""

from __future__ import annotations

import json
import os

from .esri_ascii import write_ascii_grid, write_ascii_mask
from .geogrid import GridSpec, ScalarGrid
from .planner import CandidateRegion, CriterionLayer, PlanReport, _flat_centers


def _f(v: float) -> str:
    return repr(float(v))


def report_to_dict(report: PlanReport) -> dict:
    return {
        "config": report.config,
        "rain_threshold_db": report.rain_threshold_db,
        "per_criterion_fraction": report.per_criterion_fraction,
        "pairwise_fraction": report.pairwise_fraction,
        "all_criteria_fraction": report.all_criteria_fraction,
        "n_regions": report.n_regions,
        "regions": [
            {
                "region_id": r.region_id,
                "n_cells": r.n_cells,
                "centroid_lat": r.centroid[0],
                "centroid_lon": r.centroid[1],
                "centroid_degenerate": r.centroid_degenerate,
            }
            for r in report.regions
        ],
        "sites": [
            {
                "gw_id": s.gw_id,
                "lat": s.lat,
                "lon": s.lon,
                "region_id": s.region_id,
                "criterion_values": s.criterion_values,
            }
            for s in report.sites
        ],
    }


def write_report_json(report: PlanReport, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")


def write_sites_csv(report: PlanReport, path) -> None:
    criteria = list(report.per_criterion_fraction)
    header = ["gw_id", "lat", "lon", "region_id", "region_cells", *criteria]
    by_region = {r.region_id: r for r in report.regions}
    lines = [",".join(header)]
    for s in report.sites:
        row = [
            str(s.gw_id),
            _f(s.lat),
            _f(s.lon),
            str(s.region_id),
            str(by_region[s.region_id].n_cells),
        ]
        row.extend(_f(s.criterion_values[name]) for name in criteria)
        lines.append(",".join(row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_stats_csv(
    singles: dict[str, float], pairwise: dict[str, float], all_fraction: float, path
) -> None:
    """Selection-fraction table: single rows, then pairs, then `all`."""
    lines = ["criteria,fraction"]
    for name, frac in singles.items():
        lines.append(f"{name},{_f(frac)}")
    for key, frac in pairwise.items():
        lines.append(f"{key},{_f(frac)}")
    lines.append(f"all,{_f(all_fraction)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _region_feature(region: CandidateRegion, spec: GridSpec) -> dict:
    lats, lons = _flat_centers(spec, region.cell_flat)
    return {
        "type": "Feature",
        "geometry": {
            "type": "MultiPoint",
            "coordinates": [
                [float(lon), float(lat)] for lat, lon in zip(lats, lons)
            ],
        },
        "properties": {
            "region_id": region.region_id,
            "n_cells": region.n_cells,
            "centroid_lat": region.centroid[0],
            "centroid_lon": region.centroid[1],
        },
    }


def write_regions_geojson(report: PlanReport, spec: GridSpec, path) -> None:
    collection = {
        "type": "FeatureCollection",
        "features": [_region_feature(r, spec) for r in report.regions],
    }
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(collection, fh, indent=2)
        fh.write("\n")


def write_sites_geojson(report: PlanReport, path) -> None:
    features = [
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [s.lon, s.lat]},
            "properties": {
                "gw_id": s.gw_id,
                "region_id": s.region_id,
                **s.criterion_values,
            },
        }
        for s in report.sites
    ]
    collection = {"type": "FeatureCollection", "features": features}
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(collection, fh, indent=2)
        fh.write("\n")


def write_layer_masks(layers: list[CriterionLayer], out_dir) -> list[str]:
    """One ESRI ASCII mask per criterion; returns the written paths."""
    paths = []
    for layer in layers:
        path = os.path.join(out_dir, f"mask_{layer.name}.asc")
        write_ascii_mask(layer.mask(), path)
        paths.append(path)
    return paths


def write_scalar_grids(grids: dict[str, ScalarGrid], out_dir) -> list[str]:
    paths = []
    for name, grid in grids.items():
        path = os.path.join(out_dir, f"grid_{name}.asc")
        write_ascii_grid(grid, path)
        paths.append(path)
    return paths
