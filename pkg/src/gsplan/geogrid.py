"""Geographic lattice shared by every criterion layer.

A grid cell is the half-open box [lat, lat + step_lat) x [lon, lon + step_lon)
and is represented by its center. Scalar layers store one float64 per cell,
row-major with row 0 at lat_min; NaN is the in-memory NODATA sentinel (files
use an explicit nodata value, see esri_ascii). Grids and masks are immutable
after construction and all operations here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecMismatchError

# Tolerance for requiring (bound span / step) to be an exact cell count.
_CELL_COUNT_TOL = 1e-9


def _exact_count(span: float, step: float, axis: str) -> int:
    n = span / step
    if abs(n - round(n)) > _CELL_COUNT_TOL or round(n) < 1:
        raise ValueError(
            f"{axis} span {span} is not an integer multiple of step {step}"
        )
    return int(round(n))


@dataclass(frozen=True)
class GridSpec:
    """Bounds and step of the coordinate lattice, degrees."""

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    step_lat: float
    step_lon: float

    def __post_init__(self) -> None:
        if self.step_lat <= 0 or self.step_lon <= 0:
            raise ValueError("grid steps must be positive")
        if not (-90.0 <= self.lat_min < self.lat_max <= 90.0):
            raise ValueError(f"bad latitude bounds [{self.lat_min}, {self.lat_max}]")
        if not (-180.0 <= self.lon_min < self.lon_max <= 180.0):
            raise ValueError(f"bad longitude bounds [{self.lon_min}, {self.lon_max}]")
        _exact_count(self.lat_max - self.lat_min, self.step_lat, "latitude")
        _exact_count(self.lon_max - self.lon_min, self.step_lon, "longitude")

    @property
    def n_lat(self) -> int:
        return _exact_count(self.lat_max - self.lat_min, self.step_lat, "latitude")

    @property
    def n_lon(self) -> int:
        return _exact_count(self.lon_max - self.lon_min, self.step_lon, "longitude")

    @property
    def n_cells(self) -> int:
        return self.n_lat * self.n_lon

    def lat_centers(self) -> np.ndarray:
        return self.lat_min + (np.arange(self.n_lat) + 0.5) * self.step_lat

    def lon_centers(self) -> np.ndarray:
        return self.lon_min + (np.arange(self.n_lon) + 0.5) * self.step_lon

    def is_global_lon(self) -> bool:
        """True when the longitude span closes the full circle."""
        return abs((self.lon_max - self.lon_min) - 360.0) <= _CELL_COUNT_TOL


def default_global_spec() -> GridSpec:
    """Whole-Earth lattice at 0.1 degree resolution."""
    return GridSpec(-90.0, 90.0, -180.0, 180.0, 0.1, 0.1)


@dataclass(frozen=True)
class CellIndex:
    i_lat: int
    i_lon: int


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarGrid:
    """One float64 value per cell; NaN marks NODATA."""

    spec: GridSpec
    values: np.ndarray
    unit: str = ""

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if vals.shape != (self.spec.n_lat, self.spec.n_lon):
            raise ValueError(
                f"values shape {vals.shape} does not match spec "
                f"({self.spec.n_lat}, {self.spec.n_lon})"
            )
        if np.isinf(vals).any():
            raise ValueError("grid values must be finite or NaN (NODATA)")
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def nodata_mask(self) -> np.ndarray:
        return np.isnan(self.values)


@dataclass(frozen=True)
class BoolMask:
    """Per-cell accept/reject flags on the same layout as ScalarGrid."""

    spec: GridSpec
    accepted: np.ndarray

    def __post_init__(self) -> None:
        acc = np.array(self.accepted, dtype=bool, order="C", copy=True)
        if acc.shape != (self.spec.n_lat, self.spec.n_lon):
            raise ValueError(
                f"mask shape {acc.shape} does not match spec "
                f"({self.spec.n_lat}, {self.spec.n_lon})"
            )
        object.__setattr__(self, "accepted", _freeze(acc))


def cell_center(spec: GridSpec, idx: CellIndex) -> tuple[float, float]:
    """Center coordinates (lat, lon) of a cell."""
    if not (0 <= idx.i_lat < spec.n_lat and 0 <= idx.i_lon < spec.n_lon):
        raise IndexError(f"cell {idx} outside grid {spec.n_lat}x{spec.n_lon}")
    lat = spec.lat_min + (idx.i_lat + 0.5) * spec.step_lat
    lon = spec.lon_min + (idx.i_lon + 0.5) * spec.step_lon
    return lat, lon


def wrap_lon(lon: float) -> float:
    """Canonicalize a longitude into [-180, 180)."""
    if lon == 180.0:
        return -180.0
    if -180.0 <= lon < 180.0:
        return lon
    return (lon + 180.0) % 360.0 - 180.0


def index_of(spec: GridSpec, lat: float, lon: float) -> CellIndex:
    """Cell containing (lat, lon); floor-based inverse of cell_center.

    The exact upper edge is folded into the last row/column so that every
    coordinate of the closed bound box maps to a cell.
    """
    if spec.is_global_lon():
        lon = wrap_lon(lon)
    if not (spec.lat_min <= lat <= spec.lat_max):
        raise ValueError(f"latitude {lat} outside [{spec.lat_min}, {spec.lat_max}]")
    if not (spec.lon_min <= lon <= spec.lon_max):
        raise ValueError(f"longitude {lon} outside [{spec.lon_min}, {spec.lon_max}]")
    i_lat = min(int(math.floor((lat - spec.lat_min) / spec.step_lat)), spec.n_lat - 1)
    i_lon = min(int(math.floor((lon - spec.lon_min) / spec.step_lon)), spec.n_lon - 1)
    return CellIndex(i_lat, i_lon)


def threshold(grid: ScalarGrid, mode: str, value: float) -> BoolMask:
    """Accept cells <= value ("at_most") or >= value ("at_least").

    NODATA cells never pass: a criterion that cannot be evaluated must not
    admit a gateway.
    """
    if mode == "at_most":
        accepted = grid.values <= value
    elif mode == "at_least":
        accepted = grid.values >= value
    else:
        raise ValueError(f"unknown threshold mode {mode!r}")
    return BoolMask(grid.spec, accepted)


def intersect(masks: list[BoolMask]) -> BoolMask:
    """Logical AND of masks sharing one GridSpec."""
    if not masks:
        raise ValueError("intersect needs at least one mask")
    spec = masks[0].spec
    for m in masks[1:]:
        if m.spec != spec:
            raise SpecMismatchError(f"mask spec {m.spec} differs from {spec}")
    out = masks[0].accepted
    for m in masks[1:]:
        out = out & m.accepted
    return BoolMask(spec, out)


def selection_fraction(mask: BoolMask) -> float:
    """Accepted cells over total cells (cell-count, not area-weighted)."""
    return float(np.count_nonzero(mask.accepted)) / mask.spec.n_cells


def _containing_indices(
    coords: np.ndarray, low: float, step: float, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Source indices of the cells containing coords, plus a coverage mask."""
    idx = np.floor((coords - low) / step).astype(np.int64)
    inside = (idx >= 0) & (idx < n)
    # a center exactly on the top edge belongs to the last source cell
    on_edge = (~inside) & (idx == n) & (coords <= low + step * n)
    idx[on_edge] = n - 1
    inside |= on_edge
    return np.clip(idx, 0, n - 1), inside


def resample_nearest(source: ScalarGrid, target_spec: GridSpec) -> ScalarGrid:
    """Sample the source at each target cell center; gaps become NODATA."""
    if source.spec == target_spec:
        return ScalarGrid(target_spec, source.values, source.unit)
    li, lin = _containing_indices(
        target_spec.lat_centers(), source.spec.lat_min,
        source.spec.step_lat, source.spec.n_lat,
    )
    gi, gin = _containing_indices(
        target_spec.lon_centers(), source.spec.lon_min,
        source.spec.step_lon, source.spec.n_lon,
    )
    out = source.values[np.ix_(li, gi)].copy()
    out[~lin, :] = np.nan
    out[:, ~gin] = np.nan
    return ScalarGrid(target_spec, out, source.unit)
