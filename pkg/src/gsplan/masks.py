"""Terrain/water mask, altitude layer, and the synthetic geopolitical mask.

The geopolitical mask uses a counter-based generator (splitmix64 finalizer on
seed XOR flat cell index) so the draw for a cell depends only on the seed and
the cell, never on evaluation order or grid partitioning: reruns and parallel
schedules are bit-identical, and any sub-rectangle of the mask equals the
full-grid mask restricted to those cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geogrid import BoolMask, GridSpec, ScalarGrid, resample_nearest


@dataclass(frozen=True)
class TerrainGrid:
    """Elevation above sea level in meters; open water may be NODATA."""

    grid: ScalarGrid


@dataclass(frozen=True)
class GeoPoliticalMask:
    mask: BoolMask
    seed: int
    blocked_fraction: float


def land_mask(terrain: TerrainGrid) -> BoolMask:
    """Accept strictly positive elevations; water, NODATA and below-sea-level
    cells are all excluded."""
    vals = terrain.grid.values
    with np.errstate(invalid="ignore"):
        accepted = vals > 0.0
    return BoolMask(terrain.grid.spec, accepted)


_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over uint64 inputs."""
    with np.errstate(over="ignore"):  # modular 2^64 wrap is the algorithm
        z = (np.asarray(x, dtype=np.uint64) + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
        z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
        z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
        return z ^ (z >> np.uint64(31))


def gen_geopolitical_mask(
    spec: GridSpec, seed: int, blocked_fraction: float
) -> GeoPoliticalMask:
    """Block each cell independently with probability blocked_fraction."""
    if not (0.0 <= blocked_fraction <= 1.0):
        raise ValueError("blocked fraction must lie in [0, 1]")
    if not (0 <= seed < 2**64):
        raise ValueError("seed must be a 64-bit unsigned integer")
    idx = np.arange(spec.n_cells, dtype=np.uint64)
    draws = splitmix64(np.uint64(seed) ^ idx)
    # draw/2^64 < fraction, decided in exact integer arithmetic:
    # equivalent to draw < ceil(fraction * 2^64)
    cut = math.ceil(Fraction(blocked_fraction) * 2**64)
    blocked = draws < np.uint64(cut) if cut < 2**64 else np.ones(spec.n_cells, bool)
    allowed = ~blocked.reshape(spec.n_lat, spec.n_lon)
    return GeoPoliticalMask(BoolMask(spec, allowed), seed, blocked_fraction)


def altitude_grid(terrain: TerrainGrid, spec: GridSpec) -> ScalarGrid:
    """Elevation resampled onto the planner lattice, unit meters."""
    return resample_nearest(terrain.grid, spec)
