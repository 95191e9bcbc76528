# tests/test_thermo.py
import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.coupling import frequency_grid
from src.errors import BracketError, ModelError
from src.model import ModelParams, bose_occupation
from src.oracles import sharp_magnon_number
from src.spectra import fock_total_spectral_function
from src.thermo import (
    MagnetizationCurve,
    MagnetizationSample,
    curie_sweep,
    curie_temperature,
    interior_minimum,
    magnetization,
    magnetization_curve,
    magnon_number,
    magnon_number_exponent,
    occupied_spectrum,
    spectrum_at_temperature,
    thermal_weight,
)


class TestThermalWeight:

    def test_zero_temperature_is_identically_zero(self, omega):
        assert np.all(thermal_weight(omega, 0.0, 3e-4) == 0)

    def test_weight_by_sign_of_frequency(self):
        omega = np.array([-0.1, -0.01, -1e-4, 0.0, 1e-4, 0.01, 0.1])
        weight = thermal_weight(omega, 300.0, 3e-4)
        assert np.all(weight[2:5] == 0)
        np.testing.assert_allclose(weight[5:], bose_occupation(omega[5:], 300.0))
        np.testing.assert_allclose(weight[:2], -bose_occupation(-omega[:2], 300.0))

    def test_rejects_negative_cut(self, omega):
        with pytest.raises(ModelError):
            thermal_weight(omega, 300.0, -1e-4)

    def test_occupied_spectrum_at_zero_temperature(self, params, omega):
        fock = fock_total_spectral_function(params, omega)
        assert np.all(occupied_spectrum(omega, 0.0, fock, params.eta) == 0)

    def test_occupied_spectrum_is_product_of_factors(self, params, omega):
        bare = params.with_coupling(0.0)
        fock = fock_total_spectral_function(bare, omega)
        product = occupied_spectrum(omega, 300.0, fock, bare.eta)
        i = int(np.argmin(np.abs(omega - 0.1)))
        assert product[i] == pytest.approx(bose_occupation(omega[i], 300.0) * fock[i], rel=1e-12)

    def test_noise_level_negatives_are_clamped(self):
        omega = np.array([-0.02, -0.01, 0.01, 0.02])
        a_total = np.array([1e-12, 0.3, 1.0, 1.0])
        product = occupied_spectrum(omega, 300.0, a_total, 1e-3)
        assert product[0] == 0.0
        assert product[1] < 0
        assert np.all(product[2:] > 0)


class TestMagnonNumber:

    @pytest.mark.parametrize("A_coupling", [0.0, 0.032, 0.064])
    def test_ground_state_magnetization(self, params, omega, A_coupling):
        assert magnetization(params.with_coupling(A_coupling), omega) == 0.5
        number, shift = magnon_number(params.with_coupling(A_coupling), omega)
        assert number == 0.0
        assert shift.T == 0.0

    def test_broadened_number_close_to_sharp_oracle(self, params, omega):
        bare = params.with_coupling(0.0).with_temperature(300.0)
        number, _ = magnon_number(bare, omega)
        assert number == pytest.approx(sharp_magnon_number(bare), rel=0.15)

    @pytest.mark.slow
    def test_narrow_broadening_reproduces_sharp_oracle(self):
        bare = ModelParams(A_coupling=0.0, eta=3e-6, T=300.0)
        fine = frequency_grid(-0.05, 0.15, 1e-6)
        number, _ = magnon_number(bare, fine)
        assert number == pytest.approx(sharp_magnon_number(bare), rel=0.03)

    @pytest.mark.slow
    def test_low_temperature_power_law(self):
        bare = ModelParams(A_coupling=0.0, eta=1e-6)
        fine = frequency_grid(-0.02, 0.12, 3e-7)
        temperatures = [10.0, 20.0, 40.0, 70.0, 100.0]
        numbers = [magnon_number(bare.with_temperature(T), fine, nodes=256)[0] for T in temperatures]
        assert magnon_number_exponent(temperatures, numbers) == pytest.approx(1.5, abs=0.1)

    def test_magnetization_is_consistent_with_magnon_number(self, params, omega):
        hot = params.with_coupling(0.064).with_temperature(300.0)
        number, shift = magnon_number(hot, omega)
        assert magnetization(hot, omega) == 0.5 - number
        assert 0.0 < number
        assert np.isfinite(shift.U_prime_D)

    def test_occupied_spectrum_integrates_to_magnon_number(self, warm_params, omega):
        number, _ = magnon_number(warm_params, omega)
        a_total, _ = spectrum_at_temperature(warm_params, omega)
        product = occupied_spectrum(omega, warm_params.T, a_total, warm_params.eta)
        assert trapezoid(product, omega) == pytest.approx(number, rel=1e-9)
        assert 0.0 < number < 0.5

    def test_cut_sensitivity(self, warm_params, omega):
        strong = warm_params.with_coupling(0.064)
        full = magnetization(strong, omega, omega_cut=strong.eta)
        half = magnetization(strong, omega, omega_cut=0.5 * strong.eta)
        assert abs(half - full) < 0.02 * abs(full)

    def test_magnetization_decreases_with_temperature(self, params, omega):
        curve = magnetization_curve(params, [0.0, 100.0, 200.0, 300.0], omega)
        assert curve.is_monotone_until_zero()
        assert curve.samples[0].m == 0.5
        assert np.all(np.diff(curve.magnetization) < 0)
        assert len({s.U_prime_D for s in curve.samples}) == 4

    def test_uncoupled_magnetization_decreases_on_fine_temperature_grid(self, params, narrow_omega):
        bare = params.with_coupling(0.0)
        curve = magnetization_curve(bare, np.arange(0.0, 301.0, 10.0), narrow_omega)
        assert len(curve.samples) == 31
        assert np.all(curve.magnetization > 0)
        assert np.all(np.diff(curve.magnetization) < 0)

    def test_exponent_fit_of_exact_power_law(self):
        T = np.array([10.0, 20.0, 40.0, 80.0])
        assert magnon_number_exponent(T, 3e-4 * T**1.5) == pytest.approx(1.5)
        with pytest.raises(ModelError):
            magnon_number_exponent([10.0], [1.0])


class TestCurveHelpers:

    def test_monotone_check_stops_at_first_zero(self):
        samples = [MagnetizationSample(T, m, 0.5 - m, 0.0) for T, m in
                   [(0.0, 0.5), (100.0, 0.3), (200.0, -0.1), (300.0, 0.05)]]
        assert MagnetizationCurve(0.032, samples).is_monotone_until_zero()

    def test_monotone_check_detects_rise(self):
        samples = [MagnetizationSample(T, m, 0.5 - m, 0.0) for T, m in [(0.0, 0.5), (100.0, 0.3), (200.0, 0.4)]]
        assert not MagnetizationCurve(0.032, samples).is_monotone_until_zero()

    def test_interior_minimum(self):
        assert interior_minimum([900.0, 700.0, 800.0])
        assert not interior_minimum([900.0, 800.0, 700.0])
        assert not interior_minimum([1.0, 2.0])


class TestCurieTemperature:

    def test_rejects_inverted_bracket(self, params, omega):
        with pytest.raises(ModelError):
            curie_temperature(params, omega, bracket=(300.0, 100.0))

    def test_no_sign_change_raises_bracket_error(self, omega):
        stiff = ModelParams(W_magnon=100.0, A_coupling=0.0)
        with pytest.raises(BracketError):
            curie_temperature(stiff, omega)

    @pytest.mark.slow
    def test_magnetization_vanishes_at_curie_temperature(self, params, omega):
        Tc = curie_temperature(params, omega)
        assert 50.0 < Tc < 1e4
        assert abs(magnetization(params.with_temperature(Tc), omega)) < 1e-3

    @pytest.mark.slow
    def test_small_coupling_lowers_curie_temperature(self, params, omega):
        table = curie_sweep(params, [0.0, 0.032], omega)
        assert [A for A, _ in table] == [0.0, 0.032]
        assert table[1][1] < table[0][1]
