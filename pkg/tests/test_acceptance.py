"""Acceptance suite: one test per acceptance criterion, at stated tolerances.

Each test prints an `ACCEPTANCE <name>: PASS` line when its criterion holds
(run pytest with -s to watch them stream).

The full 0.1-degree global rerun is gated behind GSPLAN_FULLSCALE=1 because a
6.48M-cell visibility sweep takes minutes; the always-on desk-scale variant
covers the pipeline at 1 degree inside the CI budget.
"""

import json
import math
import os
import time

import numpy as np
import pytest
from oracles import and_count_fraction, exhaustive_nearest_cell, flood_fill_regions

from gsplan.atmos import RainModelInputs, attenuation_001, attenuation_details, load_coefficient_table
from gsplan.cli import main
from gsplan.esri_ascii import write_ascii_grid
from gsplan.geogrid import BoolMask, GridSpec, selection_fraction
from gsplan.masks import gen_geopolitical_mask, splitmix64
from gsplan.orbits import (
    VisibilityConfig,
    WalkerConstellation,
    avg_visible_grid,
    coverage_central_angle_deg,
)
from gsplan.planner import (
    CriterionLayer,
    attach_centroid,
    cluster_regions,
    compute_statistics,
    select_site,
)
from gsplan.synthetic import synth_population, synth_rain_map, synth_terrain, write_workspace
from test_masks import SPLITMIX64_REFERENCE, SPLITMIX64_SEED


def report_pass(name):
    print(f"ACCEPTANCE {name}: PASS")


def test_coverage_geometry_oracle():
    """Visibility boundary equals the analytic cap radius on a 1-degree grid."""
    started = time.monotonic()
    lam = coverage_central_angle_deg(800.0, 10.0)
    assert lam == pytest.approx(18.95, abs=0.05)

    constellation = WalkerConstellation(800.0, 0.0, 1, 1)
    spec = GridSpec(-90.0, 90.0, -180.0, 180.0, 1.0, 1.0)
    snapshot = VisibilityConfig(10.0, 1.0, 2.0)  # single t=0 sample
    avg = avg_visible_grid(constellation, spec, snapshot)
    visible = avg.values > 0.0

    # subsatellite point at t=0 is (0 N, 0 E)
    lats = np.radians(spec.lat_centers())[:, None]
    lons = np.radians(spec.lon_centers())[None, :]
    central_deg = np.degrees(
        np.arccos(np.clip(np.cos(lats) * np.cos(lons), -1.0, 1.0))
    )
    analytic = central_deg <= lam
    assert np.array_equal(visible, analytic), "cell-by-cell mismatch with cap"
    # boundary tolerance form of the same criterion
    assert central_deg[visible].max() <= lam + 0.05
    outside = ~visible
    assert central_deg[outside].min() >= lam - 0.05

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"coverage oracle took {elapsed:.1f} s"
    report_pass("coverage-geometry-oracle")


def test_rain_chain_oracle():
    """Reference-case intermediates within 0.5%; zero at R=0; monotone in R."""
    table = load_coefficient_table()
    reference = RainModelInputs(30.0, 10.0, 45.0, 30.0, 5.0, 0.0, 45.0)
    expected = {
        "gamma_r": 5.570334593394147,
        "l_s": 28.79385241571817,
        "l_g": 28.356409098088548,
        "r001": 0.4149752274582721,
        "zeta": 23.021107416545615,
        "l_r": 11.948735455612566,
        "chi": 0.0,
        "v001": 1.075761117633156,
        "l_e": 12.853985008032693,
        "a001": 71.60099735321425,
    }
    details = attenuation_details(reference, table)
    for name, value in expected.items():
        if value == 0.0:
            assert details[name] == 0.0, name
        else:
            assert details[name] == pytest.approx(value, rel=5e-3), name

    for freq in (19.7, 30.0, 40.5, 47.2):
        zero = attenuation_001(
            RainModelInputs(freq, 10.0, 45.0, 0.0, 5.0, 0.0, 45.0), table
        )
        assert zero == 0.0
        series = [
            attenuation_001(
                RainModelInputs(freq, 10.0, 45.0, float(r), 5.0, 0.0, 45.0), table
            )
            for r in range(0, 101)
        ]
        assert all(b >= a for a, b in zip(series, series[1:])), freq
        assert all(b > a for a, b in zip(series, series[1:]))  # strict off zero
    report_pass("rain-chain-oracle")


def test_pipeline_monotonicity_suite():
    """200 random 20x20 fixtures: all <= pair <= singles, oracle-checked."""
    spec = GridSpec(-50.0, 50.0, -50.0, 50.0, 5.0, 5.0)
    assert (spec.n_lat, spec.n_lon) == (20, 20)
    rng = np.random.default_rng(2024)
    violations = 0
    for trial in range(200):
        layers = [
            CriterionLayer(
                f"c{k}", BoolMask(spec, rng.random((20, 20)) < rng.uniform(0.2, 0.9))
            )
            for k in range(5)
        ]
        masks, _, singles, pairwise, all_frac = compute_statistics(layers)
        by_name = {layer.name: m.accepted for layer, m in zip(layers, masks)}
        for key, frac in pairwise.items():
            a, b = key.split("+")
            oracle = and_count_fraction(by_name[a], by_name[b])
            if frac != oracle:
                violations += 1
            if frac > min(singles[a], singles[b]) or all_frac > frac:
                violations += 1
        for name, frac in singles.items():
            if all_frac > frac:
                violations += 1
    assert violations == 0
    report_pass("pipeline-monotonicity-suite")


def test_clustering_oracle():
    """500 random 32x32 masks match a brute-force flood fill exactly."""
    wrap_spec = GridSpec(-90.0, 90.0, -180.0, 180.0, 5.625, 11.25)
    window_spec = GridSpec(0.0, 32.0, 0.0, 32.0, 1.0, 1.0)
    rng = np.random.default_rng(404)
    for trial in range(500):
        wrap = trial % 2 == 0
        spec = wrap_spec if wrap else window_spec
        density = rng.uniform(0.1, 0.8)
        accepted = rng.random((32, 32)) < density
        if wrap and trial % 10 == 0:
            accepted[:, 0] = True  # force seam activity
            accepted[:, -1] = True
        got = [
            sorted(int(v) for v in r.cell_flat)
            for r in cluster_regions(BoolMask(spec, accepted))
        ]
        expected = flood_fill_regions(accepted, wrap)
        assert got == expected, f"trial {trial} (wrap={wrap})"
    report_pass("clustering-oracle")


def test_centroid_selection_oracle():
    """select_site equals exhaustive search on 200+ random regions."""
    spec = GridSpec(-90.0, 90.0, -180.0, 180.0, 5.625, 11.25)
    rng = np.random.default_rng(808)
    checked = 0
    while checked < 200:
        accepted = rng.random((32, 32)) < rng.uniform(0.05, 0.35)
        for region in cluster_regions(BoolMask(spec, accepted)):
            attach_centroid(region, spec)
            select_site(region, spec)
            got = region.selected_cell.i_lat * spec.n_lon + region.selected_cell.i_lon
            expected = exhaustive_nearest_cell(
                spec, region.cell_flat, region.centroid[0], region.centroid[1]
            )
            assert got == expected
            checked += 1

    # antimeridian fixture resolves to the 180 side
    strip = GridSpec(-0.2, 0.2, -180.0, 180.0, 0.1, 0.1)
    accepted = np.zeros((4, strip.n_lon), bool)
    accepted[1, 0] = accepted[1, -1] = accepted[2, 0] = accepted[2, -1] = True
    (region,) = cluster_regions(BoolMask(strip, accepted))
    site = select_site(region, strip)
    assert abs(site.lon) == pytest.approx(179.95)
    report_pass("centroid-selection-oracle")


def _case_study_config(tmp_path, step_deg, step_s):
    return write_workspace(tmp_path, step_deg=step_deg, step_s=step_s)


def test_case_study_rerun_desk_scale(tmp_path):
    """Paper parameters at 1 degree with the 8x8 shell: < 60 s, byte-stable."""
    config = _case_study_config(tmp_path / "ws", 1.0, 60.0)
    started = time.monotonic()
    out_a = tmp_path / "run_a"
    assert main(["plan", "--config", config, "--out", str(out_a),
                 "--emit", "report,csv,geojson"]) == 0
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"desk-scale run took {elapsed:.1f} s"

    report = json.loads((out_a / "report.json").read_text())
    echo = report["config"]
    assert echo["grid"]["step_lat"] == 1.0
    assert echo["constellation"]["altitude_km"] == 800.0
    assert echo["constellation"]["n_planes"] == 8
    assert echo["visibility"]["min_elevation_deg"] == 10.0
    assert echo["weather"]["frequencies_ghz"] == [19.7, 30.0, 40.5, 47.2]
    assert echo["thresholds"]["rain_max_fraction"] == 0.25
    assert echo["thresholds"]["min_visible_sats"] == 3.0
    assert echo["thresholds"]["traffic_min_mbps_km2"] == 33.0

    singles = report["per_criterion_fraction"]
    pairwise = report["pairwise_fraction"]
    all_frac = report["all_criteria_fraction"]
    assert set(singles) == {"rain", "visibility", "traffic", "land", "geopolitical"}
    assert len(pairwise) == 10
    for key, frac in pairwise.items():
        a, b = key.split("+")
        assert frac <= min(singles[a], singles[b]) + 1e-15
        assert all_frac <= frac + 1e-15
    assert report["n_regions"] == len(report["sites"])
    # 64 satellites at 800 km average < 3 visible everywhere, so the pinned
    # 8x8 desk fixture legitimately selects nothing; the invariants still
    # have to hold and the run must be stable. A denser shell demonstrating
    # nonzero selection is exercised in test_planner.

    out_b = tmp_path / "run_b"
    assert main(["plan", "--config", config, "--out", str(out_b),
                 "--emit", "report,csv,geojson"]) == 0
    for name in ("report.json", "sites.csv", "stats.csv",
                 "regions.geojson", "sites.geojson"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
    report_pass("case-study-rerun-desk-scale")


@pytest.mark.fullscale
@pytest.mark.skipif(
    os.environ.get("GSPLAN_FULLSCALE") != "1",
    reason="full 0.1-degree global run takes minutes; set GSPLAN_FULLSCALE=1",
)
def test_case_study_rerun_full_scale(tmp_path):
    """Paper parameters at the native 0.1-degree global grid.

    Uses a 16x16 shell (the paper pins only the 800 km altitude) so the
    visibility criterion admits cells and the run produces sites.
    """
    config = write_workspace(
        str(tmp_path / "ws"), step_deg=0.1, step_s=120.0,
        n_planes=16, sats_per_plane=16,
    )
    out = tmp_path / "run_full"
    started = time.monotonic()
    assert main(["plan", "--config", config, "--out", str(out),
                 "--emit", "report,csv"]) == 0
    elapsed = time.monotonic() - started
    report = json.loads((out / "report.json").read_text())
    singles = report["per_criterion_fraction"]
    for key, frac in report["pairwise_fraction"].items():
        a, b = key.split("+")
        assert frac <= min(singles[a], singles[b]) + 1e-15
        assert report["all_criteria_fraction"] <= frac + 1e-15
    assert report["n_regions"] == len(report["sites"]) > 0
    print(f"full-scale case study completed in {elapsed:.0f} s "
          f"with {report['n_regions']} regions")
    report_pass("case-study-rerun-full-scale")


def test_geopolitical_mask_determinism():
    """Frozen 64-value splitmix64 reference; blocked share within 1%."""
    idx = np.arange(64, dtype=np.uint64)
    got = splitmix64(np.uint64(SPLITMIX64_SEED) ^ idx)
    assert got.tolist() == SPLITMIX64_REFERENCE

    spec = GridSpec(-50.0, 50.0, -180.0, 180.0, 0.4, 0.36)
    assert spec.n_cells == 250_000
    mask = gen_geopolitical_mask(spec, SPLITMIX64_SEED, 0.1)
    rerun = gen_geopolitical_mask(spec, SPLITMIX64_SEED, 0.1)
    assert np.array_equal(mask.mask.accepted, rerun.mask.accepted)
    blocked = 1.0 - float(mask.mask.accepted.mean())
    assert blocked == pytest.approx(0.1, abs=0.01)
    report_pass("geopolitical-mask-determinism")
