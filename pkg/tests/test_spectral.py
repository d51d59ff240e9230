import math

import numpy as np
import pytest
from scipy.integrate import quad

from thermoq.spectral import (
    OhmicDensity,
    bath_response,
    bose_occupation,
    bose_occupation_dT,
    jump_rates,
    lamb_shifts,
    low_T_scaling_exponent,
    principal_value_integral,
)

OHMIC = OhmicDensity(g=1.0, alpha=1.0, cutoff=5.0)


class TestBoseOccupation:
    def test_zero_temperature(self):
        assert bose_occupation(1.0, 0.0) == 0.0

    def test_unit_point(self):
        assert bose_occupation(1.0, 1.0) == pytest.approx(1.0 / (math.e - 1.0), rel=1e-14)

    def test_classical_limit_against_series(self):
        # N = T/w - 1/2 + w/(12 T) - w^3/(720 T^3) + ...
        n = bose_occupation(1.0, 100.0)
        series = 100.0 - 0.5 + 1.0 / 1200.0
        assert n == pytest.approx(series, abs=2e-9)

    def test_deep_quantum_regime_underflows_cleanly(self):
        assert bose_occupation(800.0, 1.0) == 0.0

    def test_tiny_frequency_is_finite(self):
        n = bose_occupation(1e-250, 1.0)
        assert np.isfinite(n) and n > 1e249

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bose_occupation(0.0, 1.0)
        with pytest.raises(ValueError):
            bose_occupation(1.0, -0.1)


class TestBoseDerivative:
    def test_unit_point(self):
        expected = math.e / (math.e - 1.0) ** 2
        assert bose_occupation_dT(1.0, 1.0) == pytest.approx(expected, rel=1e-14)

    def test_low_temperature_suppression(self):
        assert bose_occupation_dT(1.0, 0.005) < 1e-80

    def test_finite_difference_oracle(self):
        h = 1e-5
        fd = (bose_occupation(1.0, 1.0 + h) - bose_occupation(1.0, 1.0 - h)) / (2 * h)
        assert bose_occupation_dT(1.0, 1.0) == pytest.approx(fd, rel=1e-8)

    def test_requires_positive_temperature(self):
        with pytest.raises(ValueError):
            bose_occupation_dT(1.0, 0.0)


class TestJumpRates:
    def test_zero_temperature(self):
        gp, gm, dg = jump_rates(1.0, 0.0, OHMIC)
        assert gp == pytest.approx(2.0 * math.pi, rel=1e-15)
        assert gm == 0.0
        assert dg == 0.0

    def test_unit_point_values(self):
        # direct evaluation of 2 pi (1+N), 2 pi N, 2 pi dN/dT at w = T = 1
        gp, gm, dg = jump_rates(1.0, 1.0, OHMIC)
        assert gp == pytest.approx(9.939852800901699, rel=1e-13)
        assert gm == pytest.approx(3.656667493722113, rel=1e-13)
        assert dg == pytest.approx(5.784762799834621, rel=1e-13)

    @pytest.mark.parametrize("w", [0.2, 1.0, 3.7])
    @pytest.mark.parametrize("T", [0.05, 0.5, 2.0, 40.0])
    def test_detailed_balance(self, w, T):
        gp, gm, _ = jump_rates(w, T, OHMIC)
        assert gm / gp == pytest.approx(math.exp(-w / T), rel=1e-13)

    def test_beyond_cutoff_is_domain_error(self):
        with pytest.raises(ValueError):
            jump_rates(5.5, 1.0, OHMIC)


class TestPrincipalValue:
    def test_linear_integrand_analytic(self):
        # PV of x/(x-1) over [0,5] = 5 + log 4 via x + log|x-1|
        val = principal_value_integral(lambda x: x, 1.0, 5.0)
        assert val == pytest.approx(5.0 + math.log(4.0), abs=1e-8)

    def test_constant_integrand(self):
        val = principal_value_integral(lambda x: 3.5, 2.0, 5.0)
        assert val == pytest.approx(3.5 * math.log(3.0 / 2.0), rel=1e-10)

    def test_linearity_and_sign_flip(self):
        f = lambda x: x * x
        g = lambda x: math.cos(x)
        pv_f = principal_value_integral(f, 1.3, 5.0)
        pv_g = principal_value_integral(g, 1.3, 5.0)
        combo = principal_value_integral(lambda x: 2.0 * f(x) - 0.7 * g(x), 1.3, 5.0)
        assert combo == pytest.approx(2.0 * pv_f - 0.7 * pv_g, abs=1e-9)
        flipped = principal_value_integral(lambda x: -f(x), 1.3, 5.0)
        assert flipped == pytest.approx(-pv_f, abs=1e-12)

    def test_excision_oracle_thermal_integrand(self):
        # independent oracle: symmetric excision with linear-in-epsilon
        # Richardson (excised window contributes 2 eps f'(w) + O(eps^3))
        f = lambda x: x * bose_occupation(x, 1.0)

        def excised(eps):
            lo, _ = quad(lambda x: f(x) / (x - 1.0), 0.0, 1.0 - eps,
                         epsabs=1e-12, epsrel=1e-13, limit=400)
            hi, _ = quad(lambda x: f(x) / (x - 1.0), 1.0 + eps, 5.0,
                         epsabs=1e-12, epsrel=1e-13, limit=400)
            return lo + hi

        eps = 1e-3
        oracle = 2.0 * excised(eps / 2.0) - excised(eps)
        val = principal_value_integral(f, 1.0, 5.0)
        assert val == pytest.approx(oracle, abs=1e-7)

    def test_pole_outside_interval_rejected(self):
        with pytest.raises(ValueError):
            principal_value_integral(lambda x: x, 6.0, 5.0)


class TestLambShifts:
    def test_zero_temperature_thermal_parts_vanish(self):
        delta, delta_T, ddelta = lamb_shifts(1.0, 0.0, OHMIC)
        assert delta_T == 0.0 and ddelta == 0.0
        assert delta == pytest.approx(5.0 + math.log(4.0), abs=1e-8)

    def test_delta_is_temperature_independent(self):
        d1 = lamb_shifts(1.0, 0.3, OHMIC)[0]
        d2 = lamb_shifts(1.0, 2.0, OHMIC)[0]
        assert d1 == d2  # same deterministic quadrature, bit-identical

    @pytest.mark.parametrize("T", [0.25, 1.0, 3.0])
    def test_derivative_matches_finite_difference(self, T):
        h = T * 1e-4
        dp = lamb_shifts(1.0, T + h, OHMIC)[1]
        dm = lamb_shifts(1.0, T - h, OHMIC)[1]
        fd = (dp - dm) / (2 * h)
        analytic = lamb_shifts(1.0, T, OHMIC)[2]
        assert analytic == pytest.approx(fd, rel=1e-6)

    def test_thermal_shift_negative_below_resonance_weight(self):
        # at low T the thermal weight sits below w, so delta_T < 0
        assert lamb_shifts(1.0, 0.05, OHMIC)[1] < 0

    def test_s_dot_sign_convention(self):
        resp = bath_response(1.0, 1.0, OHMIC)
        assert resp.s_dot == -resp.ddeltaT_dT


class TestLowTScaling:
    @pytest.mark.parametrize("alpha,expected", [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)])
    def test_exponent_matches_one_plus_alpha(self, alpha, expected):
        density = OhmicDensity(g=1.0, alpha=alpha, cutoff=5.0)
        grid = np.geomspace(1e-3, 1e-2, 8)
        slope = low_T_scaling_exponent(density, 1.0, grid)
        assert slope == pytest.approx(expected, rel=0.02)

    def test_grid_must_be_deep_in_low_T_regime(self):
        with pytest.raises(ValueError):
            low_T_scaling_exponent(OHMIC, 1.0, np.array([0.005, 0.02]))


class TestOhmicDensity:
    def test_support(self):
        assert OHMIC(2.0) == 2.0
        assert OHMIC(5.0) == 5.0
        assert OHMIC(5.0001) == 0.0
        assert OHMIC(0.0) == 0.0

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            OhmicDensity(g=-1.0, alpha=1.0, cutoff=5.0)
        with pytest.raises(ValueError):
            OhmicDensity(g=1.0, alpha=-0.5, cutoff=5.0)
        with pytest.raises(ValueError):
            OhmicDensity(g=1.0, alpha=1.0, cutoff=0.0)
