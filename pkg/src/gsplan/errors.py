"""Exception hierarchy shared across the planner.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
InvariantError (and anything unexpected) -> 4.
"""


class GsplanError(Exception):
    pass


class ConfigError(GsplanError):
    """Invalid or incomplete run configuration."""


class DataError(GsplanError):
    """Unusable input data (malformed raster, empty grid, missing file)."""


class SpecMismatchError(DataError):
    """Grids that must share a lattice do not."""


class InvariantError(GsplanError):
    """An internal consistency check failed; indicates a bug, not bad input."""
