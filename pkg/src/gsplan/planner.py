"""Decision flow: evaluate criterion layers, intersect, cluster, select sites.

Layers are a registry keyed by name so operators can add criteria without
touching the pipeline. Each layer is thresholded independently (no information
flows between layers), the per-layer masks are ANDed, accepted cells are
clustered into 8-connected regions (with antimeridian wraparound on grids
spanning the full longitude circle), and each region contributes one gateway:
the accepted cell nearest the region's spherical centroid.
"""

from __future__ import annotations

import itertools
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Union

import numpy as np
from scipy import ndimage

from . import atmos, demand, masks, orbits
from .errors import DataError, InvariantError
from .esri_ascii import read_ascii_grid, read_ascii_mask
from .geogrid import (
    BoolMask,
    CellIndex,
    GridSpec,
    ScalarGrid,
    cell_center,
    intersect,
    selection_fraction,
    threshold,
)

if TYPE_CHECKING:
    from .config import RunConfig


@dataclass(frozen=True)
class ThresholdConfig:
    """The decision thresholds, one per criterion."""

    rain_max_fraction: float = 0.25
    min_visible_sats: float = 3.0
    traffic_min_mbps_km2: float = 33.0
    require_land: bool = True
    require_geo_allowed: bool = True
    altitude_max_m: Optional[float] = None

    def __post_init__(self) -> None:
        if not (0.0 < self.rain_max_fraction <= 1.0):
            raise ValueError("rain_max_fraction must lie in (0, 1]")
        if self.min_visible_sats < 0:
            raise ValueError("min_visible_sats cannot be negative")


@dataclass(frozen=True)
class CriterionLayer:
    """One named criterion: a raster plus its acceptance rule.

    Scalar layers carry a threshold mode and value; mask layers are already
    boolean and take no rule.
    """

    name: str
    grid: Union[ScalarGrid, BoolMask]
    mode: Optional[str] = None
    value: Optional[float] = None

    def __post_init__(self) -> None:
        scalar = isinstance(self.grid, ScalarGrid)
        if scalar and (self.mode is None or self.value is None):
            raise ValueError(f"scalar layer {self.name!r} needs mode and value")
        if not scalar and self.mode is not None:
            raise ValueError(f"mask layer {self.name!r} takes no threshold rule")

    @property
    def spec(self) -> GridSpec:
        return self.grid.spec

    def mask(self) -> BoolMask:
        if isinstance(self.grid, BoolMask):
            return self.grid
        return threshold(self.grid, self.mode, self.value)


@dataclass
class CandidateRegion:
    """A maximal connected blob of accepted cells."""

    region_id: int
    cell_flat: np.ndarray  # sorted flat indices into the owning spec
    centroid: Optional[tuple[float, float]] = None
    centroid_degenerate: bool = False
    selected_cell: Optional[CellIndex] = None

    @property
    def n_cells(self) -> int:
        return int(self.cell_flat.size)

    def cells(self, spec: GridSpec) -> list[CellIndex]:
        n_lon = spec.n_lon
        return [CellIndex(int(f) // n_lon, int(f) % n_lon) for f in self.cell_flat]


@dataclass(frozen=True)
class GatewaySite:
    gw_id: int
    lat: float
    lon: float
    region_id: int
    criterion_values: dict[str, float] = field(default_factory=dict)


@dataclass
class PlanReport:
    config: dict
    rain_threshold_db: float
    per_criterion_fraction: dict[str, float]
    pairwise_fraction: dict[str, float]  # keyed "a+b" in layer order
    all_criteria_fraction: float
    n_regions: int
    sites: list[GatewaySite]
    regions: list[CandidateRegion]

    def check_invariants(self) -> None:
        """Fraction chain and partition sanity; raises InvariantError."""
        singles = self.per_criterion_fraction
        for key, frac in self.pairwise_fraction.items():
            a, b = key.split("+")
            if frac > min(singles[a], singles[b]) + 1e-15:
                raise InvariantError(f"pair {key} fraction exceeds a single fraction")
            if self.all_criteria_fraction > frac + 1e-15:
                raise InvariantError(f"all-criteria fraction exceeds pair {key}")
        if self.n_regions != len(self.regions) or self.n_regions != len(self.sites):
            raise InvariantError("region/site counts disagree")


def resolve_rain_threshold(rain_grid: ScalarGrid, fraction: float) -> float:
    """Threshold = fraction of the grid's maximum attenuation."""
    vals = rain_grid.values
    if np.isnan(vals).all():
        raise DataError("rain grid has no data; cannot resolve threshold")
    return fraction * float(np.nanmax(vals))


def evaluate_layers(layers: list[CriterionLayer]) -> tuple[list[BoolMask], BoolMask]:
    """Threshold each layer independently, then AND them all."""
    if not layers:
        raise ValueError("no criterion layers to evaluate")
    names = [layer.name for layer in layers]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate layer names in {names}")
    layer_masks = [layer.mask() for layer in layers]
    return layer_masks, intersect(layer_masks)


def _eight_connected_labels(accepted: np.ndarray, wrap_lon: bool) -> np.ndarray:
    """Label map (0 = background) under 8-connectivity, optional lon wrap."""
    labels, n = ndimage.label(accepted, structure=np.ones((3, 3), dtype=int))
    if not wrap_lon or n == 0 or accepted.shape[1] < 2:
        return labels

    # stitch the antimeridian seam: column 0 touches column n_lon-1,
    # including diagonal neighbours
    parent = list(range(n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    n_lat = accepted.shape[0]
    left, right = labels[:, 0], labels[:, -1]
    for i in range(n_lat):
        if left[i] == 0:
            continue
        for j in (i - 1, i, i + 1):
            if 0 <= j < n_lat and right[j] != 0:
                union(int(left[i]), int(right[j]))
    lut = np.array([find(x) for x in range(n + 1)])
    return lut[labels]


def cluster_regions(mask: BoolMask) -> list[CandidateRegion]:
    """Connected components of the accepted set, ordered by first cell."""
    labels = _eight_connected_labels(mask.accepted, mask.spec.is_global_lon())
    flat_labels = labels.ravel()
    occupied = np.nonzero(flat_labels)[0]
    if occupied.size == 0:
        return []
    # group by label; regions ordered by their smallest flat index
    order = np.argsort(flat_labels[occupied], kind="stable")
    sorted_flat = occupied[order]
    sorted_labels = flat_labels[occupied][order]
    boundaries = np.nonzero(np.diff(sorted_labels))[0] + 1
    groups = np.split(sorted_flat, boundaries)
    groups.sort(key=lambda g: int(g[0]))
    return [
        CandidateRegion(region_id=i, cell_flat=np.sort(g))
        for i, g in enumerate(groups)
    ]


def _unit_vectors(lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    la, lo = np.radians(lats), np.radians(lons)
    return np.column_stack(
        [np.cos(la) * np.cos(lo), np.cos(la) * np.sin(lo), np.sin(la)]
    )


def _flat_centers(spec: GridSpec, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    i_lat, i_lon = np.divmod(flat, spec.n_lon)
    lats = spec.lat_min + (i_lat + 0.5) * spec.step_lat
    lons = spec.lon_min + (i_lon + 0.5) * spec.step_lon
    return lats, lons


def region_centroid(
    cell_flat: np.ndarray, spec: GridSpec
) -> tuple[tuple[float, float], bool]:
    """Spherical centroid of the cell centers and a degeneracy flag.

    Unit vectors are averaged and renormalized, which stays well behaved
    across the antimeridian. A vanishing mean (antipodally symmetric region)
    falls back to the first cell's center and is flagged.
    """
    if cell_flat.size == 0:
        raise ValueError("region has no cells")
    lats, lons = _flat_centers(spec, cell_flat)
    mean = _unit_vectors(lats, lons).mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < 1e-12:
        lat0, lon0 = _flat_centers(spec, cell_flat[:1])
        return (float(lat0[0]), float(lon0[0])), True
    mean /= norm
    lat = math.degrees(math.asin(max(-1.0, min(1.0, mean[2]))))
    lon = math.degrees(math.atan2(mean[1], mean[0]))
    if lon == 180.0:
        lon = -180.0
    return (lat, lon), False


def attach_centroid(region: CandidateRegion, spec: GridSpec) -> CandidateRegion:
    region.centroid, region.centroid_degenerate = region_centroid(
        region.cell_flat, spec
    )
    return region


# Distances this close (degrees of arc) count as a tie; symmetric regions
# produce mathematically equal distances that float trig spreads by ~1e-13.
SITE_DISTANCE_TIE_TOL_DEG = 1e-9


def select_site(
    region: CandidateRegion,
    spec: GridSpec,
    gw_id: Optional[int] = None,
    criterion_values: Optional[dict[str, float]] = None,
) -> GatewaySite:
    """Gateway at the accepted cell nearest the region centroid.

    Distance is the great-circle angle to the centroid; cells within
    SITE_DISTANCE_TIE_TOL_DEG of the minimum are ties and resolve to the
    smallest flat index.
    """
    if region.centroid is None:
        attach_centroid(region, spec)
    c_lat, c_lon = region.centroid
    target = _unit_vectors(np.array([c_lat]), np.array([c_lon]))[0]
    lats, lons = _flat_centers(spec, region.cell_flat)
    angles = np.degrees(np.arccos(np.clip(_unit_vectors(lats, lons) @ target, -1.0, 1.0)))
    tied = np.nonzero(angles <= angles.min() + SITE_DISTANCE_TIE_TOL_DEG)[0]
    best = int(tied[0])  # cell_flat is sorted, so this is the smallest index
    flat = int(region.cell_flat[best])
    idx = CellIndex(flat // spec.n_lon, flat % spec.n_lon)
    region.selected_cell = idx
    lat, lon = cell_center(spec, idx)
    return GatewaySite(
        gw_id=region.region_id if gw_id is None else gw_id,
        lat=lat,
        lon=lon,
        region_id=region.region_id,
        criterion_values=dict(criterion_values or {}),
    )


class LayerBuildError(DataError):
    def __init__(self, layer: str, cause: Exception):
        super().__init__(f"building layer {layer!r} failed: {cause}")
        self.layer = layer


@contextmanager
def _building(name: str):
    try:
        yield
    except LayerBuildError:
        raise
    except Exception as exc:
        raise LayerBuildError(name, exc) from exc


def build_rain_layer(config: "RunConfig") -> tuple[CriterionLayer, dict]:
    """Worst-case attenuation over the configured frequencies plus extras."""
    spec = config.grid_spec
    with _building("rain"):
        table = atmos.load_coefficient_table(config.weather.coefficient_table)
        rain_map = atmos.RainRateMap(read_ascii_grid(config.weather.rain_map, "mm/h"))
        per_freq = [
            atmos.rain_attenuation_grid(
                rain_map,
                spec,
                f,
                config.visibility.min_elevation_deg,
                config.weather.polarization_tilt_deg,
                config.weather.rain_height_km,
                table,
            )
            for f in config.weather.frequencies_ghz
        ]
        combined = atmos.worst_case_over_frequencies(per_freq)
        rain_thr = resolve_rain_threshold(
            combined, config.thresholds.rain_max_fraction
        )
        extras = {
            "rain_per_frequency": dict(zip(config.weather.frequencies_ghz, per_freq)),
            "rain_threshold_db": rain_thr,
        }
        return CriterionLayer("rain", combined, "at_most", rain_thr), extras


def build_visibility_layer(config: "RunConfig") -> tuple[CriterionLayer, ScalarGrid]:
    """Average-visible-count criterion plus the seen-over-time fraction grid."""
    with _building("visibility"):
        avg, frac = orbits.visibility_grids(
            config.constellation, config.grid_spec, config.visibility
        )
        layer = CriterionLayer(
            "visibility", avg, "at_least", config.thresholds.min_visible_sats
        )
        return layer, frac


def build_traffic_layer(config: "RunConfig") -> CriterionLayer:
    with _building("traffic"):
        pop = demand.PopulationGrid(
            read_ascii_grid(config.traffic.population_map, "persons/km2")
        )
        traffic = demand.traffic_density_grid(pop, config.traffic.params, config.grid_spec)
        return CriterionLayer(
            "traffic", traffic, "at_least", config.thresholds.traffic_min_mbps_km2
        )


def build_altitude_grid(config: "RunConfig") -> ScalarGrid:
    with _building("land"):
        terrain = masks.TerrainGrid(read_ascii_grid(config.masks.terrain_map, "m"))
        return masks.altitude_grid(terrain, config.grid_spec)


def build_geopolitical_layer(config: "RunConfig") -> CriterionLayer:
    spec = config.grid_spec
    with _building("geopolitical"):
        if config.masks.geopolitical_mode == "random":
            geo = masks.gen_geopolitical_mask(
                spec,
                config.masks.geopolitical_seed,
                config.masks.geopolitical_blocked_fraction,
            ).mask
        else:
            geo = read_ascii_mask(config.masks.geopolitical_map)
            if geo.spec != spec:
                raise DataError(
                    "geopolitical mask raster does not match the planner grid"
                )
        return CriterionLayer("geopolitical", geo)


def build_layers(config: "RunConfig") -> tuple[list[CriterionLayer], dict]:
    """Construct every configured criterion layer plus auxiliary grids.

    Returns the ordered layer list and a dict of extra artifacts
    (per-frequency rain grids, visibility fraction grid, altitude grid,
    resolved rain threshold).
    """
    layers: list[CriterionLayer] = []

    rain_layer, extras = build_rain_layer(config)
    layers.append(rain_layer)

    visibility_layer, frac = build_visibility_layer(config)
    extras["visibility_fraction"] = frac
    layers.append(visibility_layer)

    layers.append(build_traffic_layer(config))

    alt = build_altitude_grid(config)
    extras["altitude"] = alt
    if config.thresholds.require_land:
        with _building("land"):
            layers.append(CriterionLayer("land", masks.land_mask(masks.TerrainGrid(alt))))

    if config.thresholds.require_geo_allowed:
        layers.append(build_geopolitical_layer(config))

    if config.thresholds.altitude_max_m is not None:
        with _building("altitude"):
            layers.append(
                CriterionLayer(
                    "altitude", alt, "at_most", config.thresholds.altitude_max_m
                )
            )

    return layers, extras


def _criterion_values_at(
    layers: list[CriterionLayer], idx: CellIndex
) -> dict[str, float]:
    out = {}
    for layer in layers:
        if isinstance(layer.grid, ScalarGrid):
            out[layer.name] = float(layer.grid.values[idx.i_lat, idx.i_lon])
        else:
            out[layer.name] = float(layer.grid.accepted[idx.i_lat, idx.i_lon])
    return out


def compute_statistics(
    layers: list[CriterionLayer],
) -> tuple[list[BoolMask], BoolMask, dict[str, float], dict[str, float], float]:
    """Per-layer, pairwise and all-criteria selection fractions."""
    layer_masks, combined = evaluate_layers(layers)
    singles = {
        layer.name: selection_fraction(m) for layer, m in zip(layers, layer_masks)
    }
    pairwise = {
        f"{a.name}+{b.name}": selection_fraction(intersect([ma, mb]))
        for (a, ma), (b, mb) in itertools.combinations(
            list(zip(layers, layer_masks)), 2
        )
    }
    return layer_masks, combined, singles, pairwise, selection_fraction(combined)


def run_plan(config: "RunConfig") -> PlanReport:
    """The full decision flow for one configuration."""
    layers, extras = build_layers(config)
    return plan_from_layers(config, layers, extras)


def plan_from_layers(
    config: "RunConfig", layers: list[CriterionLayer], extras: dict
) -> PlanReport:
    """Decision flow over already-built layers (lets callers reuse them)."""
    layer_masks, combined, singles, pairwise, all_frac = compute_statistics(layers)

    regions = cluster_regions(combined)
    spec = config.grid_spec
    sites = []
    for region in regions:
        attach_centroid(region, spec)
        site = select_site(region, spec, gw_id=region.region_id)
        site = GatewaySite(
            gw_id=site.gw_id,
            lat=site.lat,
            lon=site.lon,
            region_id=site.region_id,
            criterion_values=_criterion_values_at(layers, region.selected_cell),
        )
        sites.append(site)

    report = PlanReport(
        config=config.echo(),
        rain_threshold_db=extras["rain_threshold_db"],
        per_criterion_fraction=singles,
        pairwise_fraction=pairwise,
        all_criteria_fraction=all_frac,
        n_regions=len(regions),
        sites=sites,
        regions=regions,
    )
    report.check_invariants()
    return report
