"""Traffic-demand criterion grid from population density and service uptake."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geogrid import GridSpec, ScalarGrid, resample_nearest


@dataclass(frozen=True)
class TrafficParams:
    throughput_per_user_mbps: float
    penetration_rate: float
    concurrency_rate: float

    def __post_init__(self) -> None:
        if self.throughput_per_user_mbps <= 0:
            raise ValueError("throughput per user must be positive")
        for name in ("penetration_rate", "concurrency_rate"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class PopulationGrid:
    """Population density raster, persons/km2."""

    grid: ScalarGrid

    def __post_init__(self) -> None:
        with np.errstate(invalid="ignore"):
            if np.any(self.grid.values < 0):
                raise ValueError("population density cannot be negative")


def traffic_density_grid(
    pop: PopulationGrid, params: TrafficParams, spec: GridSpec
) -> ScalarGrid:
    """Throughput density per cell: per-user rate x density x uptake rates."""
    density = resample_nearest(pop.grid, spec).values
    out = (
        params.throughput_per_user_mbps
        * density
        * params.penetration_rate
        * params.concurrency_rate
    )
    return ScalarGrid(spec, out, "Mbps/km2")


def classify_density(grid: ScalarGrid, class_edges) -> ScalarGrid:
    """Bucket each cell into classes 0..len(edges) by counting edges <= value."""
    edges = np.asarray(class_edges, dtype=np.float64)
    if edges.ndim != 1 or len(edges) == 0 or np.any(np.diff(edges) <= 0):
        raise ValueError("class edges must be strictly ascending")
    classes = np.searchsorted(edges, grid.values, side="right").astype(np.float64)
    classes[np.isnan(grid.values)] = np.nan
    return ScalarGrid(grid.spec, classes, "class")
