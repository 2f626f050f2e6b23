"""Figure builders: selection bar chart and equirectangular world map.

Both functions are read-only over the planner's files and return the figure
they saved, so callers (and tests) can inspect exactly what was drawn. Sizes
and DPI are fixed: the same inputs give the same image dimensions and the
same plotted coordinates.
"""

from __future__ import annotations

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import read_regions_geojson, read_sites_csv, read_stats_csv

DPI = 150


def render_bar_chart(stats_csv, out_image):
    """One bar per stats row, fractions shown as percentages."""
    rows = read_stats_csv(stats_csv)
    fig, ax = plt.subplots(figsize=(10, 5), dpi=DPI)
    labels = [r.criteria for r in rows]
    ax.bar(range(len(rows)), [r.fraction * 100.0 for r in rows], color="#2b6cb0")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("candidate positions [%]")
    ax.set_xlabel("criteria combination")
    ax.set_title("Share of grid positions passing each criterion set")
    fig.tight_layout()
    fig.savefig(out_image)
    return fig


def render_world_map(sites_csv, regions_geojson, out_image):
    """Region cells as shading, gateway sites as labelled markers on top."""
    sites = read_sites_csv(sites_csv)
    regions = read_regions_geojson(regions_geojson)

    known_regions = {r.region_id for r in regions}
    for site in sites:
        if site.region_id not in known_regions:
            warnings.warn(
                f"site {site.gw_id} references unknown region {site.region_id}; "
                "drawing it anyway"
            )

    fig, ax = plt.subplots(figsize=(12, 6), dpi=DPI)
    ax.set_xlim(-180.0, 180.0)
    ax.set_ylim(-90.0, 90.0)
    ax.set_xlabel("longitude [deg]")
    ax.set_ylabel("latitude [deg]")
    ax.set_title("Candidate regions and selected gateway positions")
    ax.grid(True, linewidth=0.3, alpha=0.5)

    for region in regions:
        if not region.points:
            continue
        lons = [p[0] for p in region.points]
        lats = [p[1] for p in region.points]
        ax.scatter(lons, lats, s=4, color="#74b388", marker="s", zorder=2)

    if sites:
        ax.scatter(
            [s.lon for s in sites],
            [s.lat for s in sites],
            s=60,
            color="#c53030",
            marker="^",
            edgecolors="black",
            zorder=3,  # always above region shading
        )
        for s in sites:
            ax.annotate(
                str(s.gw_id),
                (s.lon, s.lat),
                textcoords="offset points",
                xytext=(4, 4),
                fontsize=7,
                zorder=4,
            )

    fig.tight_layout()
    fig.savefig(out_image)
    return fig
