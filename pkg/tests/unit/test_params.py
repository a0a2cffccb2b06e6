"""
Unit tests for system parameters, unit conversions and layouts.
"""

import math

import pytest

from hybrid_irs.errors import (
    AlphaBoundsInverted,
    AlphaMinBelowOne,
    AngleOutOfRange,
    GeometryMismatch,
    InfeasibleAllocation,
    NegativeBudget,
    NegativeRicianFactor,
    NonFiniteValue,
    NonPositiveCost,
    NonPositiveValue,
    ParameterError,
)
from hybrid_irs.params import (
    PURE_LOS,
    Allocation,
    ArrayGeometry,
    ArrayLayout,
    SystemParams,
    alpha_db_to_linear,
    angles_from_coordinates,
    collect_violations,
    db_to_linear,
    dbm_to_watt,
    describe,
    distances_from_coordinates,
    factorize_elements,
    format_rician,
    los_weight,
    max_active,
    nlos_weight,
    passive_fill,
    rician_from_db,
    validate,
    watt_to_dbm,
)


class TestUnitConversions:
    """Test dB/dBm conversions."""

    def test_dbm_to_watt(self):
        """Test that 30 dBm is one watt and 15 dBm is about 31.6 mW."""
        assert dbm_to_watt(30.0) == pytest.approx(1.0)
        assert dbm_to_watt(15.0) == pytest.approx(0.0316227766)
        assert dbm_to_watt(-80.0) == pytest.approx(1e-11)

    def test_watt_to_dbm_inverts(self):
        """Test watt_to_dbm against dbm_to_watt."""
        for dbm in (-80.0, 0.0, 5.0, 15.0):
            assert watt_to_dbm(dbm_to_watt(dbm)) == pytest.approx(dbm)

    def test_watt_to_dbm_rejects_zero(self):
        """Test that zero power has no dBm value."""
        with pytest.raises(NonPositiveValue):
            watt_to_dbm(0.0)

    def test_db_kinds(self):
        """Test power and amplitude dB conversion."""
        assert db_to_linear(-30.0) == pytest.approx(1e-3)
        assert db_to_linear(20.0, "amplitude") == pytest.approx(10.0)
        with pytest.raises(ParameterError):
            db_to_linear(3.0, "voltage")

    def test_non_finite_db_rejected(self):
        """Test that NaN input is rejected."""
        with pytest.raises(NonFiniteValue):
            dbm_to_watt(float("nan"))

    def test_alpha_conventions(self):
        """Test both readings of a 14 dB amplification bound."""
        assert alpha_db_to_linear(14.0) == pytest.approx(25.1188643)
        assert alpha_db_to_linear(14.0, "amplitude") == pytest.approx(5.0118723)
        assert alpha_db_to_linear(0.0) == 1.0
        with pytest.raises(ParameterError):
            alpha_db_to_linear(14.0, "decibel")


class TestRicianFactor:
    """Test Rician factor parsing and weights."""

    def test_string_tokens(self):
        """Test the los and rayleigh tokens."""
        assert rician_from_db("los") == PURE_LOS
        assert rician_from_db("LoS") == PURE_LOS
        assert rician_from_db("rayleigh") == 0.0
        assert rician_from_db(10) == pytest.approx(10.0)
        assert rician_from_db(0) == 1.0

    def test_unknown_token(self):
        """Test that an unknown token is rejected."""
        with pytest.raises(ParameterError):
            rician_from_db("strong")

    def test_weights_at_pure_los(self):
        """Test that the pure-LoS sentinel gives exact weights."""
        assert los_weight(PURE_LOS) == 1.0
        assert nlos_weight(PURE_LOS) == 0.0

    def test_weights_sum_to_one(self):
        """Test K/(K+1) + 1/(K+1) = 1."""
        for k in (0.0, 0.5, 1.0, 10.0, 1e6):
            assert los_weight(k) + nlos_weight(k) == pytest.approx(1.0)
        assert los_weight(0.0) == 0.0

    def test_format(self):
        """Test the loggable label."""
        assert format_rician(PURE_LOS) == "los"
        assert format_rician(0.0) == "rayleigh"
        assert format_rician(10.0) == "10dB"


class TestSystemParams:
    """Test SystemParams defaults and validation."""

    def test_defaults_validate(self, default_params):
        """Test that the default scenario is valid."""
        assert default_params.validate() is default_params
        assert default_params.d_bi == 60.0
        assert default_params.w0 == 3000.0
        assert default_params.alpha_max == pytest.approx(25.1188643)

    @pytest.mark.parametrize("overrides", [{}, {"k1": PURE_LOS, "k2": 0.0}, {"w0": 0.0}])
    def test_validate_is_idempotent(self, overrides):
        """Test that validating an already validated scenario changes nothing."""
        once = validate(SystemParams(**overrides))
        twice = validate(once)
        assert twice is once
        assert twice == SystemParams(**overrides)

    def test_derived_gains(self, default_params):
        """Test the derived link gains."""
        p = default_params
        assert p.amplifier_input_power == pytest.approx(p.p_bs * p.beta / 3600.0 + p.sigma2_amp)
        assert p.cascade_gain == pytest.approx(1e-6 / (3600.0 * 400.0))
        assert p.amp_noise_gain == pytest.approx(1e-11 * 1e-3 / 400.0)

    def test_los_and_rayleigh_flags(self, los_params, rayleigh_params, default_params):
        """Test pure_los and rayleigh properties."""
        assert los_params.pure_los and not los_params.rayleigh
        assert rayleigh_params.rayleigh and not rayleigh_params.pure_los
        assert not default_params.pure_los

    @pytest.mark.parametrize(
        "changes, error",
        [
            ({"p_bs": 0.0}, NonPositiveValue),
            ({"sigma2_rx": -1e-11}, NonPositiveValue),
            ({"d_iu": 0.0}, NonPositiveValue),
            ({"alpha_min": 0.5}, AlphaMinBelowOne),
            ({"alpha_max": 1.0}, AlphaBoundsInverted),
            ({"w0": -1.0}, NegativeBudget),
            ({"k2": -0.1}, NegativeRicianFactor),
            ({"w_pas": 0.0}, NonPositiveCost),
            ({"beta": float("inf")}, NonFiniteValue),
            ({"p_irs": float("nan")}, NonFiniteValue),
            ({"k1": float("nan")}, NonFiniteValue),
        ],
    )
    def test_invariant_violations(self, default_params, changes, error):
        """Test that each violated invariant raises its named error."""
        with pytest.raises(error):
            default_params.with_updates(**changes)

    def test_pure_los_is_valid(self, default_params):
        """Test that an infinite Rician factor is accepted."""
        params = default_params.with_updates(k1=PURE_LOS, k2=PURE_LOS)
        assert params.pure_los

    def test_zero_budget_is_valid(self, default_params):
        """Test that W0 = 0 is accepted."""
        assert default_params.with_updates(w0=0.0).w0 == 0.0

    def test_collects_every_violation(self, default_params):
        """Test that validation reports all problems, not only the first."""
        from dataclasses import replace

        result = collect_violations(replace(default_params, p_bs=-1.0, w_act=0.0, alpha_min=0.2))
        assert not result.is_valid
        assert len(result.errors) == 3

    def test_parameter_errors_are_value_errors(self, default_params):
        """Test that parameter errors can be caught as ValueError."""
        with pytest.raises(ValueError):
            default_params.with_updates(w_act=-5.0)

    def test_describe(self, default_params):
        """Test the loggable summary."""
        summary = describe(default_params)
        assert summary["p_bs_dbm"] == pytest.approx(15.0)
        assert summary["p_irs_dbm"] == pytest.approx(5.0)
        assert summary["k1"] == "10dB"


class TestLayout:
    """Test element grids and geometry."""

    @pytest.mark.parametrize(
        "n, grid",
        [(1, (1, 1)), (12, (3, 4)), (16, (4, 4)), (7, (1, 7)), (600, (24, 25))],
    )
    def test_factorize_elements(self, n, grid):
        """Test that the grid is full and as square as possible."""
        assert factorize_elements(n) == grid

    def test_factorize_rejects_zero(self):
        """Test that an empty surface has no layout."""
        with pytest.raises(GeometryMismatch):
            factorize_elements(0)

    def test_default_angles(self):
        """Test angles of the worst-case user scenario."""
        az_aoa, el_aoa, az_aod, el_aod = angles_from_coordinates()
        assert az_aoa == pytest.approx(math.pi)
        assert az_aod == pytest.approx(math.pi / 2)
        assert el_aoa == el_aod == pytest.approx(math.pi / 2)

    def test_distances(self):
        """Test BS-IRS and IRS-user distances."""
        assert distances_from_coordinates((0, 0), (60, 0), (60, 20)) == (60.0, 20.0)

    def test_geometry_angle_range(self):
        """Test that angles outside [0, pi] are rejected."""
        with pytest.raises(AngleOutOfRange):
            ArrayGeometry(0.0125, 2, 2, -0.1, 1.0, 1.0, 1.0)

    def test_geometry_needs_elements(self):
        """Test that an empty grid is rejected."""
        with pytest.raises(GeometryMismatch):
            ArrayGeometry(0.0125, 0, 2, 1.0, 1.0, 1.0, 1.0)

    def test_for_elements_default_spacing(self):
        """Test that spacing defaults to a quarter wavelength."""
        geom = ArrayGeometry.for_elements(12, ArrayLayout(), 0.05)
        assert geom.elem_spacing == pytest.approx(0.0125)
        assert geom.n_elements == 12
        assert geom.link_angles("iu") == (geom.azimuth_aod, geom.elevation_aod)


class TestAllocation:
    """Test integer allocations and budget helpers."""

    def test_cost_and_budget(self, default_params):
        """Test cost accounting against W0 = 3000."""
        alloc = Allocation(100, 2500)
        assert alloc.cost(default_params) == 3000.0
        assert alloc.fits_budget(default_params)
        assert alloc.total == 2600

    def test_over_budget(self, default_params):
        """Test that an over-budget allocation is rejected."""
        with pytest.raises(InfeasibleAllocation):
            Allocation(100, 2501).check_budget(default_params)

    @pytest.mark.parametrize(
        "n_act, n_pas",
        [(-1, 0), (0, -3), (1.5, 0), (float("nan"), 0), (0, float("inf")), ("3", 0), (True, 0)],
    )
    def test_rejects_invalid_counts(self, n_act, n_pas):
        """Test that counts must be non-negative integers."""
        with pytest.raises(InfeasibleAllocation):
            Allocation(n_act, n_pas)

    def test_integral_floats_accepted(self):
        """Test that 3.0 is stored as the integer 3."""
        alloc = Allocation(3.0, 0)
        assert alloc.n_act == 3 and isinstance(alloc.n_act, int)

    def test_passive_fill_and_max_active(self, default_params):
        """Test the budget-filling helpers."""
        assert max_active(default_params) == 600
        assert passive_fill(default_params, 0) == 3000
        assert passive_fill(default_params, 100) == 2500
        assert passive_fill(default_params, 601) == 0

    def test_fill_absorbs_float_noise(self, default_params):
        """Test that 0.1-step costs do not lose an element to rounding."""
        params = default_params.with_updates(w_act=0.3, w_pas=0.1, w0=0.9)
        assert max_active(params) == 3
        assert passive_fill(params, 0) == 9
