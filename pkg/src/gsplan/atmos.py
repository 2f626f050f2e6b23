"""Rain attenuation criterion: specific attenuation from tabulated regression
coefficients and the 0.01%-exceeded slant-path attenuation chain.

The coefficient table ships as CSV (``data/itu_p838_coefficients.csv``) and is
interpolated log-log in k and linearly in log-frequency in alpha. The slant
path chain runs through one numpy kernel shared by the scalar and grid entry
points, so a grid cell is bit-identical to the scalar call with the same
inputs. Only the elevation >= 5 degrees branch of the chain is implemented.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DataError, InvariantError, SpecMismatchError
from .geogrid import GridSpec, ScalarGrid, resample_nearest

MIN_ELEVATION_DEG = 5.0


@dataclass(frozen=True)
class RainCoefficients:
    """Power-law regression coefficients for one frequency, both polarizations."""

    frequency_ghz: float
    k_h: float
    k_v: float
    alpha_h: float
    alpha_v: float

    def __post_init__(self) -> None:
        for name in ("k_h", "k_v", "alpha_h", "alpha_v"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class RainModelInputs:
    frequency_ghz: float
    elevation_deg: float
    polarization_tilt_deg: float
    rain_rate_mm_h: float
    rain_height_km: float
    station_height_km: float = 0.0
    latitude_deg: float = 0.0

    def __post_init__(self) -> None:
        if not (1.0 <= self.frequency_ghz <= 100.0):
            raise ValueError("frequency must lie in [1, 100] GHz")
        if self.elevation_deg < MIN_ELEVATION_DEG:
            raise ValueError(
                f"only the elevation >= {MIN_ELEVATION_DEG} deg branch is supported"
            )
        if not self.rain_rate_mm_h >= 0:
            raise ValueError("rain rate must be a non-negative number")
        if self.rain_height_km <= self.station_height_km:
            raise ValueError("rain height must exceed station height")


@dataclass(frozen=True)
class RainRateMap:
    """R_0.01 raster, mm/h exceeded 0.01% of an average year."""

    grid: ScalarGrid

    def __post_init__(self) -> None:
        with np.errstate(invalid="ignore"):
            if np.any(self.grid.values < 0):
                raise ValueError("rain rates cannot be negative")


def load_coefficient_table(path=None) -> list[RainCoefficients]:
    """Read the coefficient CSV; defaults to the packaged table."""
    if path is None:
        source = resources.files("gsplan.data").joinpath("itu_p838_coefficients.csv")
        text = source.read_text(encoding="ascii")
    else:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    rows = list(csv.DictReader(text.splitlines()))
    if not rows:
        raise DataError("coefficient table is empty")
    try:
        table = [
            RainCoefficients(
                frequency_ghz=float(r["freq_ghz"]),
                k_h=float(r["k_h"]),
                k_v=float(r["k_v"]),
                alpha_h=float(r["alpha_h"]),
                alpha_v=float(r["alpha_v"]),
            )
            for r in rows
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed coefficient table: {exc}") from exc
    freqs = [c.frequency_ghz for c in table]
    if any(b <= a for a, b in zip(freqs, freqs[1:])):
        raise DataError("coefficient table frequencies must be strictly increasing")
    return table


def table_frequency_range(table: list[RainCoefficients]) -> tuple[float, float]:
    return table[0].frequency_ghz, table[-1].frequency_ghz


def interpolate_coefficients(
    table: list[RainCoefficients], f_ghz: float
) -> RainCoefficients:
    """Coefficients at f: k log-log interpolated, alpha linear in log f."""
    lo, hi = table_frequency_range(table)
    if not (lo <= f_ghz <= hi):
        raise ValueError(f"frequency {f_ghz} GHz outside table range [{lo}, {hi}]")
    freqs = [c.frequency_ghz for c in table]
    for c in table:
        if c.frequency_ghz == f_ghz:
            return c
    j = bisect.bisect_right(freqs, f_ghz)
    a, b = table[j - 1], table[j]
    t = (math.log10(f_ghz) - math.log10(a.frequency_ghz)) / (
        math.log10(b.frequency_ghz) - math.log10(a.frequency_ghz)
    )

    def log_mix(x: float, y: float) -> float:
        return 10.0 ** ((1.0 - t) * math.log10(x) + t * math.log10(y))

    return RainCoefficients(
        frequency_ghz=f_ghz,
        k_h=log_mix(a.k_h, b.k_h),
        k_v=log_mix(a.k_v, b.k_v),
        alpha_h=(1.0 - t) * a.alpha_h + t * b.alpha_h,
        alpha_v=(1.0 - t) * a.alpha_v + t * b.alpha_v,
    )


def effective_k_alpha(
    coeffs: RainCoefficients, elevation_deg: float, tilt_deg: float
) -> tuple[float, float]:
    """Combine the polarization coefficients for a path geometry."""
    c2 = math.cos(math.radians(elevation_deg)) ** 2 * math.cos(
        math.radians(2.0 * tilt_deg)
    )
    kh, kv = coeffs.k_h, coeffs.k_v
    ah, av = coeffs.alpha_h, coeffs.alpha_v
    k = (kh + kv + (kh - kv) * c2) / 2.0
    alpha = (kh * ah + kv * av + (kh * ah - kv * av) * c2) / (2.0 * k)
    return k, alpha


def specific_attenuation(k: float, alpha: float, rain_rate_mm_h) -> float:
    """Power-law specific attenuation in dB/km."""
    rate = np.asarray(rain_rate_mm_h, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        if np.any(rate < 0):
            raise ValueError("rain rate cannot be negative")
    out = k * rate**alpha
    return float(out) if out.ndim == 0 else out


def _chain_arrays(
    gamma_r: np.ndarray,
    f_ghz: float,
    elevation_deg: float,
    rain_height_km: float,
    station_height_km: float,
    latitude_deg: np.ndarray,
) -> dict[str, np.ndarray]:
    """Slant-path chain on cells with gamma_r > 0. All inputs broadcastable."""
    theta = math.radians(elevation_deg)
    sin_th, cos_th = math.sin(theta), math.cos(theta)
    dh = rain_height_km - station_height_km

    l_s = dh / sin_th
    l_g = l_s * cos_th
    r001 = 1.0 / (
        1.0
        + 0.78 * np.sqrt(l_g * gamma_r / f_ghz)
        - 0.38 * (1.0 - math.exp(-2.0 * l_g))
    )
    if np.any(r001 <= 0):
        raise InvariantError("horizontal reduction factor r_0.01 went non-positive")
    zeta = np.degrees(np.arctan2(dh, l_g * r001))
    l_r = np.where(zeta > elevation_deg, l_g * r001 / cos_th, dh / sin_th)
    abs_lat = np.abs(latitude_deg)
    chi = np.where(abs_lat < 36.0, 36.0 - abs_lat, 0.0)
    v001 = 1.0 / (
        1.0
        + math.sqrt(sin_th)
        * (
            31.0
            * (1.0 - np.exp(-(elevation_deg / (1.0 + chi))))
            * np.sqrt(l_r * gamma_r)
            / f_ghz**2
            - 0.45
        )
    )
    if np.any(v001 <= 0):
        raise InvariantError("vertical adjustment factor v_0.01 went non-positive")
    l_e = l_r * v001
    return {
        "gamma_r": gamma_r,
        "l_s": np.broadcast_to(np.float64(l_s), gamma_r.shape),
        "l_g": np.broadcast_to(np.float64(l_g), gamma_r.shape),
        "r001": r001,
        "zeta": zeta,
        "l_r": l_r,
        "chi": np.broadcast_to(chi, gamma_r.shape),
        "v001": v001,
        "l_e": l_e,
        "a001": gamma_r * l_e,
    }


def attenuation_details(
    inputs: RainModelInputs, coeffs_table: list[RainCoefficients]
) -> dict[str, float]:
    """All chain intermediates for one site; used by the oracle tests."""
    coeffs = interpolate_coefficients(coeffs_table, inputs.frequency_ghz)
    k, alpha = effective_k_alpha(
        coeffs, inputs.elevation_deg, inputs.polarization_tilt_deg
    )
    rate = np.asarray([inputs.rain_rate_mm_h])
    gamma = k * rate**alpha
    if rate[0] == 0.0:
        return {"k": k, "alpha": alpha, "gamma_r": 0.0, "a001": 0.0}
    chain = _chain_arrays(
        gamma,
        inputs.frequency_ghz,
        inputs.elevation_deg,
        inputs.rain_height_km,
        inputs.station_height_km,
        np.asarray([inputs.latitude_deg]),
    )
    out = {"k": k, "alpha": alpha}
    out.update({name: float(arr[0]) for name, arr in chain.items()})
    return out


def attenuation_001(
    inputs: RainModelInputs, coeffs_table: list[RainCoefficients]
) -> float:
    """0.01%-exceeded slant-path rain attenuation, dB."""
    return attenuation_details(inputs, coeffs_table)["a001"]


def rain_attenuation_grid(
    rain_map: RainRateMap,
    spec: GridSpec,
    freq_ghz: float,
    elevation_deg: float,
    tilt_deg: float,
    rain_height_km: float,
    coeffs_table: list[RainCoefficients],
) -> ScalarGrid:
    """Per-cell attenuation over a rain-rate raster; NODATA propagates."""
    if elevation_deg < MIN_ELEVATION_DEG:
        raise ValueError(
            f"only the elevation >= {MIN_ELEVATION_DEG} deg branch is supported"
        )
    rates = resample_nearest(rain_map.grid, spec).values
    coeffs = interpolate_coefficients(coeffs_table, freq_ghz)
    k, alpha = effective_k_alpha(coeffs, elevation_deg, tilt_deg)

    lat2d = np.broadcast_to(spec.lat_centers()[:, None], rates.shape)
    out = np.full(rates.shape, np.nan)
    zero = rates == 0.0
    out[zero] = 0.0
    wet = np.isfinite(rates) & (rates > 0.0)
    if np.any(wet):
        gamma = k * rates[wet] ** alpha
        chain = _chain_arrays(
            gamma, freq_ghz, elevation_deg, rain_height_km, 0.0, lat2d[wet]
        )
        out[wet] = chain["a001"]
    return ScalarGrid(spec, out, "dB")


def worst_case_over_frequencies(grids: list[ScalarGrid]) -> ScalarGrid:
    """Cell-wise maximum; any NODATA input makes the cell NODATA."""
    if not grids:
        raise ValueError("need at least one grid")
    spec = grids[0].spec
    for g in grids[1:]:
        if g.spec != spec:
            raise SpecMismatchError("attenuation grids on different lattices")
    out = grids[0].values
    for g in grids[1:]:
        # np.maximum propagates NaN, which is exactly the NODATA rule
        out = np.maximum(out, g.values)
    return ScalarGrid(spec, out, grids[0].unit or "dB")
