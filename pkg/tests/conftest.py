import numpy as np
import pytest

from gsplan.config import (
    MasksBlock,
    OutputBlock,
    RunConfig,
    TrafficBlock,
    WeatherBlock,
)
from gsplan.demand import TrafficParams
from gsplan.esri_ascii import write_ascii_grid
from gsplan.geogrid import GridSpec, ScalarGrid
from gsplan.orbits import VisibilityConfig, WalkerConstellation
from gsplan.planner import ThresholdConfig
from gsplan.synthetic import synth_population, synth_rain_map, synth_terrain


@pytest.fixture
def coarse_spec():
    """Cheap 5-degree global lattice for fast end-to-end runs."""
    return GridSpec(-90.0, 90.0, -180.0, 180.0, 5.0, 5.0)


@pytest.fixture
def workspace(tmp_path, coarse_spec):
    """Synthetic rasters on disk plus a ready RunConfig builder."""
    spec = coarse_spec
    paths = {
        "rain": tmp_path / "rain.asc",
        "population": tmp_path / "population.asc",
        "terrain": tmp_path / "terrain.asc",
    }
    write_ascii_grid(synth_rain_map(spec), paths["rain"])
    write_ascii_grid(synth_population(spec), paths["population"])
    write_ascii_grid(synth_terrain(spec), paths["terrain"])

    def build(spec=spec, thresholds=None, constellation=None, visibility=None,
              geopolitical_blocked_fraction=0.1, geopolitical_seed=42):
        constellation = constellation or WalkerConstellation(800.0, 53.0, 4, 4, 1)
        return RunConfig(
            grid_spec=spec,
            constellation=constellation,
            visibility=visibility
            or VisibilityConfig(10.0, 600.0, 300.0),
            thresholds=thresholds or ThresholdConfig(),
            weather=WeatherBlock(rain_map=str(paths["rain"])),
            traffic=TrafficBlock(
                population_map=str(paths["population"]),
                params=TrafficParams(10.0, 0.01, 0.33),
            ),
            masks=MasksBlock(
                terrain_map=str(paths["terrain"]),
                geopolitical_seed=geopolitical_seed,
                geopolitical_blocked_fraction=geopolitical_blocked_fraction,
            ),
            output=OutputBlock(directory=str(tmp_path / "out")),
        )

    build.paths = paths
    build.tmp_path = tmp_path
    return build


def write_island_terrain(path, spec, island_cells):
    """Terrain raster that is ocean everywhere except the given (i,j) cells."""
    vals = np.full((spec.n_lat, spec.n_lon), -100.0)
    for i, j in island_cells:
        vals[i, j] = 500.0
    write_ascii_grid(ScalarGrid(spec, vals, "m"), path)
