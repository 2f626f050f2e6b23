"""Rendering of gateway-planner outputs into report figures."""

from .io import ChartInputError, read_regions_geojson, read_sites_csv, read_stats_csv
from .render import render_bar_chart, render_world_map

__all__ = [
    "ChartInputError",
    "read_regions_geojson",
    "read_sites_csv",
    "read_stats_csv",
    "render_bar_chart",
    "render_world_map",
]
