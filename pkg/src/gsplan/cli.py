"""Command-line entry point: `gsplan plan | grid | stats`.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant violation or unexpected failure. Nothing is written unless the
configuration validates.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import outputs, planner
from .config import EMIT_CHOICES, RunConfig, load_config
from .errors import ConfigError, DataError, InvariantError
from .esri_ascii import write_ascii_grid, write_ascii_mask
from .geogrid import BoolMask, ScalarGrid

GRID_LAYERS = (
    "rain",
    "visibility_count",
    "visibility_fraction",
    "traffic",
    "altitude",
    "land",
    "geopolitical",
)


def _emit_list(values: list[str] | None, config: RunConfig) -> list[str]:
    if not values:
        return list(config.output.emit)
    flat: list[str] = []
    for v in values:
        flat.extend(p for p in v.split(",") if p)
    unknown = [e for e in flat if e not in EMIT_CHOICES]
    if unknown:
        raise ConfigError(f"unknown --emit artifacts {unknown}; choose from {EMIT_CHOICES}")
    return flat


def _cmd_plan(args) -> int:
    config = load_config(args.config)
    emit = _emit_list(args.emit, config)
    out_dir = args.out or config.output.directory
    layers, extras = planner.build_layers(config)
    report = planner.plan_from_layers(config, layers, extras)
    os.makedirs(out_dir, exist_ok=True)

    written = []
    if "report" in emit:
        path = os.path.join(out_dir, "report.json")
        outputs.write_report_json(report, path)
        written.append(path)
    if "csv" in emit:
        path = os.path.join(out_dir, "sites.csv")
        outputs.write_sites_csv(report, path)
        written.append(path)
        path = os.path.join(out_dir, "stats.csv")
        outputs.write_stats_csv(
            report.per_criterion_fraction,
            report.pairwise_fraction,
            report.all_criteria_fraction,
            path,
        )
        written.append(path)
    if "geojson" in emit:
        path = os.path.join(out_dir, "regions.geojson")
        outputs.write_regions_geojson(report, config.grid_spec, path)
        written.append(path)
        path = os.path.join(out_dir, "sites.geojson")
        outputs.write_sites_geojson(report, path)
        written.append(path)
    if "masks" in emit:
        written.extend(outputs.write_layer_masks(layers, out_dir))
    if "grids" in emit:
        grids = {
            layer.name: layer.grid
            for layer in layers
            if isinstance(layer.grid, ScalarGrid)
        }
        grids["visibility_fraction"] = extras["visibility_fraction"]
        grids.setdefault("altitude", extras["altitude"])
        written.extend(outputs.write_scalar_grids(grids, out_dir))

    print("plan summary")
    print("------------")
    for name, frac in report.per_criterion_fraction.items():
        print(f"  {name:<14s} {frac * 100.0:8.3f} % of cells accepted")
    print(f"  {'all criteria':<14s} {report.all_criteria_fraction * 100.0:8.3f} %")
    print(f"  rain threshold : {report.rain_threshold_db:.3f} dB")
    print(f"  regions        : {report.n_regions}")
    print(f"  gateway sites  : {len(report.sites)}")
    for path in written:
        print(f"  wrote {path}")
    return 0


def _build_single_layer(config: RunConfig, name: str):
    """One registry grid, building only what that layer needs."""
    if name not in GRID_LAYERS:
        raise ConfigError(
            f"unknown layer {name!r}; available: {', '.join(GRID_LAYERS)}"
        )
    if name == "rain":
        return planner.build_rain_layer(config)[0].grid
    if name == "visibility_count":
        return planner.build_visibility_layer(config)[0].grid
    if name == "visibility_fraction":
        return planner.build_visibility_layer(config)[1]
    if name == "traffic":
        return planner.build_traffic_layer(config).grid
    if name == "altitude":
        return planner.build_altitude_grid(config)
    if name == "land":
        from gsplan.masks import TerrainGrid, land_mask

        return land_mask(TerrainGrid(planner.build_altitude_grid(config)))
    return planner.build_geopolitical_layer(config).grid


def _cmd_grid(args) -> int:
    config = load_config(args.config)
    layer = _build_single_layer(config, args.layer)
    if isinstance(layer, BoolMask):
        write_ascii_mask(layer, args.out)
    else:
        write_ascii_grid(layer, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_stats(args) -> int:
    config = load_config(args.config)
    layers, _ = planner.build_layers(config)
    _, _, singles, pairwise, all_frac = planner.compute_statistics(layers)
    outputs.write_stats_csv(singles, pairwise, all_frac, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsplan",
        description="multi-criteria gateway placement planner for NGSO constellations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="run the full decision flow")
    p_plan.add_argument("--config", required=True)
    p_plan.add_argument("--out", help="output directory (default from config)")
    p_plan.add_argument(
        "--emit",
        action="append",
        metavar="|".join(EMIT_CHOICES),
        help="artifacts to write; repeatable or comma-separated",
    )
    p_plan.set_defaults(func=_cmd_plan)

    p_grid = sub.add_parser("grid", help="write a single criterion grid")
    p_grid.add_argument("--config", required=True)
    p_grid.add_argument("--layer", required=True)
    p_grid.add_argument("--out", required=True)
    p_grid.set_defaults(func=_cmd_grid)

    p_stats = sub.add_parser("stats", help="selection-fraction table only")
    p_stats.add_argument("--config", required=True)
    p_stats.add_argument("--out", required=True)
    p_stats.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"gsplan: configuration error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"gsplan: data error: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"gsplan: internal invariant violated: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
