# tests/test_spectra.py
import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.coupling import coupling_on_grid, shifted_coupling
from src.errors import ModelError
from src.model import magnon_energy, sphere_radius
from src.oracles import histogram_dos
from src.spectra import (
    SpectralGrid,
    build_spectral_grid,
    fock_magnon_retarded,
    fock_total_spectral_function,
    goldstone_peak,
    local_maxima,
    locate_peak,
    renormalized_magnon_retarded,
    spectral_function,
    spectral_map,
    total_spectral_function,
    uniform_k_grid,
)


class TestFockMagnon:

    def test_on_shell_value(self, params):
        k = 0.3 * sphere_radius(params)
        value = fock_magnon_retarded(k, magnon_energy(k, params), params)
        assert value == pytest.approx(-1j / params.eta)

    def test_far_from_pole_is_real(self, params):
        value = fock_magnon_retarded(0.0, 0.25, params)
        assert value.real == pytest.approx(1.0 / 0.25, rel=1e-5)
        assert abs(value.imag) < 1e-2 * value.real

    @pytest.mark.parametrize("fraction", [0.0, 0.5, 1.0])
    def test_frequency_integral_is_normalized(self, params, omega, fraction):
        k = fraction * sphere_radius(params)
        a = -np.imag(fock_magnon_retarded(k, omega, params)) / np.pi
        assert trapezoid(a, omega) == pytest.approx(1.0, rel=5e-3)


class TestRenormalizedMagnon:

    def test_zero_coupling_is_bitwise_fock(self, params, omega):
        bare = params.with_coupling(0.0)
        delta_total, _ = shifted_coupling(bare, omega)
        k = np.array([0.0, 0.2, 0.9]) * sphere_radius(bare)
        renormalized = renormalized_magnon_retarded(k[:, None], omega[None, :], delta_total, bare)
        assert np.array_equal(renormalized, fock_magnon_retarded(k[:, None], omega[None, :], bare))
        assert np.array_equal(renormalized_magnon_retarded(0.1, omega, None, bare),
                              fock_magnon_retarded(0.1, omega, bare))

    def test_dyson_equation(self, warm_params, omega):
        delta_total, _ = shifted_coupling(warm_params, omega)
        k = np.array([0.0, 0.4, 1.0]) * sphere_radius(warm_params)
        r = fock_magnon_retarded(k[:, None], omega[None, :], warm_params)
        R = renormalized_magnon_retarded(k[:, None], omega[None, :], delta_total, warm_params)
        np.testing.assert_allclose(1.0 / r - 1.0 / R, np.broadcast_to(delta_total.values, R.shape),
                                   rtol=1e-9, atol=1e-12)

    def test_goldstone_point(self, params, omega):
        delta_total, _ = shifted_coupling(params, omega)
        i = int(np.argmin(np.abs(omega)))
        R = renormalized_magnon_retarded(0.0, omega[i], delta_total, params)
        assert abs((1.0 / R).real) <= params.eta

    @pytest.mark.parametrize("A_coupling", [0.0, 0.032, 0.064])
    @pytest.mark.parametrize("T", [0.0, 300.0])
    def test_goldstone_peak_stays_at_zero(self, params, omega, A_coupling, T):
        p = params.with_coupling(A_coupling).with_temperature(T)
        delta_total, _ = shifted_coupling(p, omega)
        assert abs(goldstone_peak(omega, delta_total, p)) <= p.eta

    def test_peak_follows_real_part_of_coupling_below_threshold(self, params, omega):
        delta_total, _ = shifted_coupling(params, omega)
        k = 0.25 * sphere_radius(params)
        omega_k = magnon_energy(k, params)

        peak, _ = locate_peak(omega, spectral_function(k, omega, delta_total, params))

        # raíz de ω − ω_k − Re Δ_total(ω) por interpolación lineal en la malla
        below = omega < 0.04
        f = omega[below] - omega_k - delta_total.values.real[below]
        i = int(np.argmax(f > 0))
        root = omega[i - 1] - f[i - 1] * (omega[i] - omega[i - 1]) / (f[i] - f[i - 1])

        assert peak < omega_k
        assert abs(peak - root) <= 1e-4


class TestSpectralGrids:

    @pytest.mark.parametrize("A_coupling", [0.0, 0.032, 0.064])
    @pytest.mark.parametrize("T", [0.0, 300.0])
    def test_sum_rules(self, params, omega, A_coupling, T):
        p = params.with_coupling(A_coupling).with_temperature(T)
        delta_total, _ = shifted_coupling(p, omega)
        grid = build_spectral_grid(p, omega, delta_total, k_nodes=128)

        assert np.max(np.abs(grid.sum_rule() - 1.0)) <= 0.02
        assert trapezoid(grid.total(), dx=grid.omega_step) == pytest.approx(1.0, abs=0.02)

    def test_total_spectrum_matches_grid_average(self, params, narrow_omega):
        delta_total, _ = shifted_coupling(params, narrow_omega)
        grid = build_spectral_grid(params, narrow_omega, delta_total, k_nodes=128)
        total = total_spectral_function(params, narrow_omega, delta_total, nodes=128)
        np.testing.assert_allclose(total, grid.total(), rtol=1e-10, atol=1e-12)

    def test_fock_dos_matches_histogram(self, params, narrow_omega):
        bare = params.with_coupling(0.0)
        dos = fock_total_spectral_function(bare, narrow_omega)
        reference = histogram_dos(bare, narrow_omega)
        assert np.max(np.abs(dos - reference)) <= 0.01 * np.max(reference)
        # la acumulación de van Hove del borde superior
        assert abs(narrow_omega[np.argmax(dos)] - bare.W_magnon) < 5 * bare.eta

    def test_zero_temperature_has_little_weight_at_negative_frequency(self, params, omega):
        delta_total, _ = shifted_coupling(params, omega)
        a_total = total_spectral_function(params, omega, delta_total)
        negative = omega < -5 * params.eta
        assert trapezoid(a_total[negative], omega[negative]) < 1e-2

    def test_band_splits_around_phonon_energy(self, params, omega):
        hot = params.with_coupling(0.064).with_temperature(300.0)
        delta_total, _ = shifted_coupling(hot, omega)
        a_total = total_spectral_function(hot, omega, delta_total)
        fock = fock_total_spectral_function(hot, omega)

        i = int(np.argmin(np.abs(omega - hot.omega_P)))
        assert a_total[i] < 0.5 * fock[i]

        # una rama a cada lado de la energía del fonón
        maxima = local_maxima(omega, a_total, window=(0.0, 0.1))
        assert len(maxima) == 2
        assert maxima[0] < hot.omega_P < maxima[1]

    @pytest.mark.parametrize("workers", [3, 4, 8])
    def test_result_independent_of_worker_count(self, warm_params, narrow_omega, workers):
        delta_total, _ = shifted_coupling(warm_params, narrow_omega)
        serial = total_spectral_function(warm_params, narrow_omega, delta_total, workers=1)
        parallel = total_spectral_function(warm_params, narrow_omega, delta_total, workers=workers)
        assert np.array_equal(serial, parallel)

    def test_spectral_map_shape(self, params, narrow_omega):
        delta = coupling_on_grid(params, narrow_omega)
        k = uniform_k_grid(params, 5)
        values = spectral_map(params, k, narrow_omega, delta)
        assert values.shape == (5, len(narrow_omega))
        assert k[0] == 0.0 and k[-1] == pytest.approx(sphere_radius(params))

    def test_spectral_grid_rejects_bad_shape(self):
        with pytest.raises(ModelError):
            SpectralGrid(np.zeros(3), np.zeros(3), 0.0, 1e-3, np.zeros((2, 10)))
        with pytest.raises(ModelError):
            uniform_k_grid(None, 1)


class TestPeaks:

    def test_locate_peak_refines_between_grid_points(self):
        omega = np.linspace(0.0, 1.0, 101)
        values = 1.0 - (omega - 0.433) ** 2
        peak, value = locate_peak(omega, values)
        assert peak == pytest.approx(0.433, abs=1e-9)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_local_maxima_finds_both_peaks(self):
        omega = np.linspace(0.0, 0.1, 1001)
        values = np.exp(-((omega - 0.03) / 0.004) ** 2) + 0.6 * np.exp(-((omega - 0.07) / 0.004) ** 2)
        maxima = local_maxima(omega, values)
        assert len(maxima) == 2
        assert maxima[0] == pytest.approx(0.03, abs=1e-4)
        assert maxima[1] == pytest.approx(0.07, abs=1e-4)
        assert local_maxima(omega, values, window=(0.05, 0.1)) == [pytest.approx(0.07, abs=1e-4)]

    def test_locate_peak_inside_window(self):
        omega = np.linspace(-0.05, 0.3, 3501)
        values = np.exp(-(omega / 0.002) ** 2) + 3.0 * np.exp(-((omega - 0.26) / 0.002) ** 2)
        assert locate_peak(omega, values)[0] == pytest.approx(0.26, abs=1e-4)
        peak, value = locate_peak(omega, values, window=(-0.025, 0.025))
        assert peak == pytest.approx(0.0, abs=1e-4)
        assert value == pytest.approx(1.0, rel=1e-3)

    def test_locate_peak_rejects_empty_window(self):
        omega = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ModelError):
            locate_peak(omega, omega, window=(0.31, 0.39))
