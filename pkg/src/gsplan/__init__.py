"""gsplan: multi-criteria gateway placement planning for NGSO constellations."""

from .geogrid import (
    BoolMask,
    CellIndex,
    GridSpec,
    ScalarGrid,
    cell_center,
    default_global_spec,
    index_of,
    intersect,
    resample_nearest,
    selection_fraction,
    threshold,
)
from .orbits import (
    GeodeticPoint,
    SatState,
    VisibilityConfig,
    WalkerConstellation,
    avg_visible_grid,
    elevation_angle,
    propagate,
    visibility_fraction_grid,
)
from .planner import (
    CandidateRegion,
    CriterionLayer,
    GatewaySite,
    PlanReport,
    ThresholdConfig,
    cluster_regions,
    region_centroid,
    resolve_rain_threshold,
    run_plan,
    select_site,
)

__version__ = "0.1.0"

__all__ = [
    "BoolMask", "CellIndex", "GridSpec", "ScalarGrid", "cell_center",
    "default_global_spec", "index_of", "intersect", "resample_nearest",
    "selection_fraction", "threshold",
    "GeodeticPoint", "SatState", "VisibilityConfig", "WalkerConstellation",
    "avg_visible_grid", "elevation_angle", "propagate", "visibility_fraction_grid",
    "CandidateRegion", "CriterionLayer", "GatewaySite", "PlanReport",
    "ThresholdConfig", "cluster_regions", "region_centroid",
    "resolve_rain_threshold", "run_plan", "select_site",
    "__version__",
]
