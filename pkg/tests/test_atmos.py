import numpy as np
import pytest

from gsplan.atmos import (
    RainCoefficients,
    RainModelInputs,
    RainRateMap,
    attenuation_001,
    attenuation_details,
    effective_k_alpha,
    interpolate_coefficients,
    load_coefficient_table,
    rain_attenuation_grid,
    specific_attenuation,
    table_frequency_range,
    worst_case_over_frequencies,
)
from gsplan.errors import SpecMismatchError
from gsplan.geogrid import GridSpec, ScalarGrid

TABLE = load_coefficient_table()

# Step-by-step hand computation (recorded before the implementation) of the
# slant-path chain for f=30 GHz, elevation 10 deg, circular polarization,
# R=30 mm/h, rain height 5 km, station at sea level, latitude 45.
REFERENCE_CASE = RainModelInputs(
    frequency_ghz=30.0,
    elevation_deg=10.0,
    polarization_tilt_deg=45.0,
    rain_rate_mm_h=30.0,
    rain_height_km=5.0,
    station_height_km=0.0,
    latitude_deg=45.0,
)
REFERENCE_INTERMEDIATES = {
    "k": 0.2346992539683464,
    "alpha": 0.9311148757869323,
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

CASE_STUDY_FREQS = (19.7, 30.0, 40.5, 47.2)


def two_row_table(f0, f1, k0, k1, a0, a1):
    return [
        RainCoefficients(f0, k0, k0, a0, a0),
        RainCoefficients(f1, k1, k1, a1, a1),
    ]


class TestCoefficientTable:
    def test_covers_1_to_100(self):
        assert table_frequency_range(TABLE) == (1.0, 100.0)

    def test_strictly_increasing_and_positive(self):
        freqs = [c.frequency_ghz for c in TABLE]
        assert all(b > a for a, b in zip(freqs, freqs[1:]))
        for c in TABLE:
            assert min(c.k_h, c.k_v, c.alpha_h, c.alpha_v) > 0

    def test_published_30ghz_row(self):
        row = interpolate_coefficients(TABLE, 30.0)
        assert row.k_h == pytest.approx(0.2403, abs=5e-4)
        assert row.k_v == pytest.approx(0.2291, abs=5e-4)
        assert row.alpha_h == pytest.approx(0.9485, abs=5e-4)
        assert row.alpha_v == pytest.approx(0.9129, abs=5e-4)


class TestInterpolateCoefficients:
    def test_exact_row_returned_unchanged(self):
        for f in (1.0, 20.0, 30.0, 100.0):
            row = interpolate_coefficients(TABLE, f)
            original = next(c for c in TABLE if c.frequency_ghz == f)
            assert row == original

    def test_k_log_log_midpoint(self):
        table = two_row_table(10.0, 40.0, 1.0, 4.0, 0.7, 0.7)
        got = interpolate_coefficients(table, 20.0)
        assert got.k_h == pytest.approx(2.0, rel=1e-12)
        assert got.k_v == pytest.approx(2.0, rel=1e-12)

    def test_alpha_linear_in_log_f(self):
        table = two_row_table(10.0, 40.0, 1.0, 1.0, 0.5, 1.0)
        got = interpolate_coefficients(table, 20.0)
        assert got.alpha_h == pytest.approx(0.75, rel=1e-12)
        assert got.alpha_v == pytest.approx(0.75, rel=1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            interpolate_coefficients(TABLE, 0.5)
        with pytest.raises(ValueError):
            interpolate_coefficients(TABLE, 101.0)


class TestEffectiveKAlpha:
    ROW = RainCoefficients(30.0, 0.24, 0.23, 0.95, 0.91)

    def test_circular_polarization_averages_k(self):
        for elevation in (5.0, 10.0, 45.0, 80.0):
            k, _ = effective_k_alpha(self.ROW, elevation, 45.0)
            assert k == pytest.approx((0.24 + 0.23) / 2.0, rel=1e-12)

    def test_symmetric_coefficients_are_fixed_point(self):
        row = RainCoefficients(30.0, 0.2, 0.2, 0.9, 0.9)
        for elevation, tilt in ((5.0, 0.0), (30.0, 20.0), (80.0, 90.0)):
            k, alpha = effective_k_alpha(row, elevation, tilt)
            assert k == pytest.approx(0.2, rel=1e-12)
            assert alpha == pytest.approx(0.9, rel=1e-12)

    def test_horizontal_at_zero_elevation(self):
        k, alpha = effective_k_alpha(self.ROW, 0.0, 0.0)
        assert k == pytest.approx(self.ROW.k_h, rel=1e-12)
        assert alpha == pytest.approx(self.ROW.alpha_h, rel=1e-12)


class TestSpecificAttenuation:
    def test_zero_rain_zero_attenuation(self):
        assert specific_attenuation(0.1, 1.2, 0.0) == 0.0

    def test_power_law_arithmetic(self):
        assert specific_attenuation(0.1, 1.0, 10.0) == pytest.approx(1.0, rel=1e-12)

    def test_monotone_in_rain_rate(self):
        gammas = [specific_attenuation(0.3, 0.9, r) for r in range(0, 50, 5)]
        assert all(b > a for a, b in zip(gammas, gammas[1:]))

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            specific_attenuation(0.1, 1.0, -1.0)


class TestAttenuationChain:
    def test_reference_case_intermediates(self):
        details = attenuation_details(REFERENCE_CASE, TABLE)
        for name, expected in REFERENCE_INTERMEDIATES.items():
            assert details[name] == pytest.approx(expected, rel=5e-3), name

    def test_zero_rain_is_exactly_zero(self):
        inputs = RainModelInputs(30.0, 10.0, 45.0, 0.0, 5.0, 0.0, 45.0)
        assert attenuation_001(inputs, TABLE) == 0.0

    @pytest.mark.parametrize("freq", CASE_STUDY_FREQS)
    def test_non_decreasing_in_rain_rate(self, freq):
        values = [
            attenuation_001(
                RainModelInputs(freq, 10.0, 45.0, float(r), 5.0, 0.0, 45.0), TABLE
            )
            for r in range(0, 101)
        ]
        assert values[0] == 0.0
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_attenuation_grows_with_frequency(self):
        def at(freq):
            return attenuation_001(
                RainModelInputs(freq, 10.0, 45.0, 30.0, 5.0, 0.0, 45.0), TABLE
            )

        assert at(47.2) > at(19.7)
        ordered = [at(f) for f in CASE_STUDY_FREQS]
        assert ordered == sorted(ordered)

    def test_low_latitude_vertical_adjustment_changes_result(self):
        tropical = attenuation_001(
            RainModelInputs(30.0, 10.0, 45.0, 30.0, 5.0, 0.0, 0.0), TABLE
        )
        temperate = attenuation_001(
            RainModelInputs(30.0, 10.0, 45.0, 30.0, 5.0, 0.0, 45.0), TABLE
        )
        assert tropical != temperate

    def test_input_validation(self):
        with pytest.raises(ValueError):
            RainModelInputs(30.0, 4.0, 45.0, 30.0, 5.0)  # below 5 deg branch
        with pytest.raises(ValueError):
            RainModelInputs(30.0, 10.0, 45.0, 30.0, 0.0, 0.5)  # rain below station
        with pytest.raises(ValueError):
            RainModelInputs(0.5, 10.0, 45.0, 30.0, 5.0)  # frequency out of range
        with pytest.raises(ValueError):
            RainModelInputs(30.0, 10.0, 45.0, -1.0, 5.0)  # negative rain


SPEC_3X3 = GridSpec(30.0, 60.0, 0.0, 30.0, 10.0, 10.0)


def rain_map_of(values):
    return RainRateMap(ScalarGrid(SPEC_3X3, np.asarray(values, float), "mm/h"))


class TestRainAttenuationGrid:
    def test_zero_map_gives_zero_grid(self):
        grid = rain_attenuation_grid(
            rain_map_of(np.zeros((3, 3))), SPEC_3X3, 30.0, 10.0, 45.0, 5.0, TABLE
        )
        assert (grid.values == 0.0).all()
        assert grid.unit == "dB"

    def test_constant_map_varies_only_through_latitude(self):
        grid = rain_attenuation_grid(
            rain_map_of(np.full((3, 3), 30.0)), SPEC_3X3, 30.0, 10.0, 45.0, 5.0, TABLE
        )
        # constant along longitude
        assert np.ptp(grid.values, axis=1).max() == 0.0
        # cells below latitude 36 get the chi adjustment; the 35N row differs
        assert grid.values[0, 0] != grid.values[2, 0]
        # rows at 45N and 55N both have chi = 0: identical attenuation
        assert grid.values[1, 0] == grid.values[2, 0]

    def test_nodata_propagates(self):
        values = np.full((3, 3), 30.0)
        values[1, 1] = np.nan
        grid = rain_attenuation_grid(
            rain_map_of(values), SPEC_3X3, 30.0, 10.0, 45.0, 5.0, TABLE
        )
        assert np.isnan(grid.values[1, 1])
        assert np.isfinite(np.delete(grid.values.ravel(), 4)).all()

    def test_grid_application_equals_scalar_bit_exact(self):
        rng = np.random.default_rng(11)
        values = rng.uniform(0.0, 80.0, (3, 3))
        values[0, 2] = 0.0
        grid = rain_attenuation_grid(
            rain_map_of(values), SPEC_3X3, 40.5, 10.0, 45.0, 5.0, TABLE
        )
        for i, lat in enumerate(SPEC_3X3.lat_centers()):
            for j in range(3):
                scalar = attenuation_001(
                    RainModelInputs(
                        40.5, 10.0, 45.0, float(values[i, j]), 5.0, 0.0, float(lat)
                    ),
                    TABLE,
                )
                assert grid.values[i, j] == scalar  # bit-exact, shared kernel


class TestWorstCase:
    def test_single_grid_identity(self):
        g = ScalarGrid(SPEC_3X3, np.arange(9.0).reshape(3, 3), "dB")
        out = worst_case_over_frequencies([g])
        assert np.array_equal(out.values, g.values)

    def test_cellwise_max_and_commutativity(self):
        a = ScalarGrid(SPEC_3X3, np.full((3, 3), 1.0), "dB")
        b = ScalarGrid(SPEC_3X3, np.full((3, 3), 3.0), "dB")
        ab = worst_case_over_frequencies([a, b])
        ba = worst_case_over_frequencies([b, a])
        assert (ab.values == 3.0).all()
        assert np.array_equal(ab.values, ba.values)

    def test_nodata_poisons_cell(self):
        vals = np.full((3, 3), 2.0)
        vals[0, 0] = np.nan
        a = ScalarGrid(SPEC_3X3, vals, "dB")
        b = ScalarGrid(SPEC_3X3, np.full((3, 3), 1.0), "dB")
        out = worst_case_over_frequencies([a, b])
        assert np.isnan(out.values[0, 0])
        assert out.values[1, 1] == 2.0

    def test_spec_mismatch_rejected(self):
        a = ScalarGrid(SPEC_3X3, np.zeros((3, 3)), "dB")
        b = ScalarGrid(GridSpec(0.0, 30.0, 0.0, 30.0, 10.0, 10.0), np.zeros((3, 3)), "dB")
        with pytest.raises(SpecMismatchError):
            worst_case_over_frequencies([a, b])
