"""ESRI ASCII grid reader/writer.

Header lines ncols / nrows / xllcorner / yllcorner / cellsize / NODATA_value,
then data rows north-to-south. Internally rows run south-to-north, so rows are
flipped on both paths. The format carries a single cellsize, so only square
cells can be written. Values are formatted with Python's shortest round-trip
float representation, which makes rewrites byte-identical.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError
from .geogrid import BoolMask, GridSpec, ScalarGrid

DEFAULT_NODATA = -9999.0

_HEADER_ORDER = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


def _fmt(v: float) -> str:
    v = float(v)
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def write_ascii_grid(grid: ScalarGrid, path, nodata: float = DEFAULT_NODATA) -> None:
    spec = grid.spec
    if abs(spec.step_lat - spec.step_lon) > 1e-12:
        raise DataError(
            "ESRI ASCII carries a single cellsize; grid has "
            f"step_lat={spec.step_lat}, step_lon={spec.step_lon}"
        )
    vals = grid.values.copy()
    vals[np.isnan(vals)] = nodata
    lines = [
        f"ncols {spec.n_lon}",
        f"nrows {spec.n_lat}",
        f"xllcorner {_fmt(spec.lon_min)}",
        f"yllcorner {_fmt(spec.lat_min)}",
        f"cellsize {_fmt(spec.step_lat)}",
        f"NODATA_value {_fmt(nodata)}",
    ]
    for row in vals[::-1]:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_ascii_grid(path, unit: str = "") -> ScalarGrid:
    with open(path, encoding="ascii") as fh:
        tokens = fh.read().split()
    header: dict[str, float] = {}
    pos = 0
    while pos + 1 < len(tokens):
        key = tokens[pos].lower()
        if key not in _HEADER_ORDER and key != "nodata_value":
            break
        try:
            header[key] = float(tokens[pos + 1])
        except ValueError as exc:
            raise DataError(f"{path}: bad header value for {key}: {tokens[pos+1]!r}") from exc
        pos += 2
    missing = [k for k in _HEADER_ORDER if k not in header]
    if missing:
        raise DataError(f"{path}: missing header keys {missing}")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    cellsize = header["cellsize"]
    nodata = header.get("nodata_value", DEFAULT_NODATA)
    data = tokens[pos:]
    if len(data) != nrows * ncols:
        raise DataError(
            f"{path}: expected {nrows * ncols} values, found {len(data)}"
        )
    try:
        vals = np.array(data, dtype=np.float64).reshape(nrows, ncols)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell value") from exc
    vals = vals[::-1]  # file is north-to-south, memory is south-to-north
    vals[vals == nodata] = np.nan
    spec = GridSpec(
        lat_min=header["yllcorner"],
        lat_max=_snap(header["yllcorner"] + nrows * cellsize, 90.0),
        lon_min=header["xllcorner"],
        lon_max=_snap(header["xllcorner"] + ncols * cellsize, 180.0),
        step_lat=cellsize,
        step_lon=cellsize,
    )
    return ScalarGrid(spec, vals, unit)


def _snap(bound: float, edge: float) -> float:
    """Absorb float drift when an accumulated bound lands on the world edge."""
    if abs(bound - edge) < 1e-9:
        return edge
    if abs(bound + edge) < 1e-9:
        return -edge
    return bound


def write_ascii_mask(mask: BoolMask, path) -> None:
    """Write a mask as 1 (accepted) / 0 (rejected)."""
    grid = ScalarGrid(mask.spec, mask.accepted.astype(np.float64), "flag")
    write_ascii_grid(grid, path)


def read_ascii_mask(path) -> BoolMask:
    """Read a 1 = allowed / 0 = blocked raster; NODATA counts as blocked."""
    grid = read_ascii_grid(path, "flag")
    return BoolMask(grid.spec, grid.values == 1.0)
