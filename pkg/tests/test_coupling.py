# tests/test_coupling.py
import numpy as np
import pytest

from src.coupling import (
    RetardedFunction,
    check_quadrature_convergence,
    coupling_matsubara,
    coupling_on_grid,
    coupling_retarded,
    frequency_grid,
    goldstone_shift,
    intrinsic_support,
    kramers_kronig_real,
    matsubara_sum_oracle,
    pole_weight_sum,
    resonant_frequencies,
    shifted_coupling,
    uniform_step,
)
from src.errors import ModelError
from src.model import ModelParams
from src.oracles import coupling_quad, lorentzian_tail_bound


class TestRetardedCoupling:

    @pytest.mark.parametrize("T", [0.0, 300.0])
    def test_zero_coupling_gives_zero(self, params, omega, T):
        bare = params.with_coupling(0.0).with_temperature(T)
        values = coupling_retarded(omega, bare)
        assert np.all(values == 0)

    def test_zero_frequency_value(self, params):
        value = coupling_retarded(0.0, params)
        assert value.real == pytest.approx(-8.2e-3, rel=0.02)
        # todos los denominadores de emisión superan ω_P
        assert abs(value.imag) <= params.A_coupling**2 * params.eta / params.omega_P**2

    @pytest.mark.parametrize("omega_value, T", [
        (0.0, 0.0), (0.02, 0.0), (-0.2, 300.0), (0.25, 300.0),
        # dentro de las ventanas de emisión y absorción
        (0.1003, 0.0), (0.1003, 300.0), (0.14, 0.0), (0.0, 300.0), (-0.02, 300.0), (0.03, 300.0),
    ])
    def test_matches_adaptive_quadrature(self, params, omega_value, T):
        p = params.with_temperature(T)
        value = coupling_retarded(omega_value, p)
        reference = coupling_quad(omega_value, p)
        assert abs(value - reference) <= 1e-4 * abs(reference)

    def test_below_emission_threshold_is_nearly_real(self, params):
        value = coupling_retarded(0.02, params)
        bound = params.A_coupling**2 * 3 * params.eta / params.omega_P**2
        assert abs(value.imag) < bound

    def test_imaginary_sign_at_zero_temperature(self, params, omega):
        values = coupling_retarded(omega, params)
        assert np.max(values.imag) <= 1e-12

    def test_imaginary_sign_at_room_temperature(self, warm_params, omega):
        values = coupling_retarded(omega, warm_params)
        eta = warm_params.eta
        emission = omega >= 5 * eta
        absorption = (omega >= -warm_params.omega_P) & (omega <= -5 * eta)
        assert np.max(values.imag[emission]) <= 1e-12
        assert np.min(values.imag[absorption]) >= -1e-12

    def test_nearly_real_below_emission_threshold(self, params, omega):
        values = coupling_retarded(omega, params)
        below = omega <= params.omega_P - 5 * params.eta
        assert np.max(np.abs(values.imag[below])) <= 1e-3 * np.max(np.abs(values.imag))

    @pytest.mark.parametrize("T", [0.0, 300.0])
    def test_imaginary_part_bounded_by_lorentzian_tails(self, params, omega, T):
        p = params.with_temperature(T)
        values = coupling_retarded(omega, p)
        bound = lorentzian_tail_bound(omega, p, intrinsic_support(p), pole_weight_sum(p))
        assert np.all(np.abs(values.imag) <= bound * (1 + 1e-9))

    def test_quadratic_scaling_in_coupling(self, params, omega):
        sample = omega[::25]
        single = coupling_retarded(sample, params.with_coupling(0.032))
        double = coupling_retarded(sample, params.with_coupling(0.064))
        assert np.max(np.abs(double - 4.0 * single)) <= 1e-12 * np.max(np.abs(single))

    def test_lattice_constant_does_not_change_results(self, params):
        sample = np.array([-0.1, 0.0, 0.03, 0.07, 0.12])
        reference = coupling_retarded(sample, params)
        other = coupling_retarded(sample, ModelParams(a_lattice=3.0))
        np.testing.assert_allclose(other, reference, rtol=1e-10)

    @pytest.mark.parametrize("T", [0.0, 300.0])
    def test_quadrature_converges_at_resonances(self, params, T):
        p = params.with_temperature(T)
        for omega_value in resonant_frequencies(p):
            assert check_quadrature_convergence(float(omega_value), p) <= 1e-6

    def test_coarse_rule_matches_fine_rule_inside_emission_window(self, params):
        coarse = coupling_retarded(0.1003, params, nodes=512)
        fine = coupling_retarded(0.1003, params, nodes=4096)
        assert abs(coarse - fine) <= 1e-6 * abs(fine)

    def test_emission_window_has_no_node_ripple(self, params):
        window = frequency_grid(0.06, 0.14, 1e-4)
        damping = -coupling_retarded(window, params).imag
        assert np.all(np.diff(damping) > 0)

    def test_thermal_absorption_opens_at_phonon_energy(self, params, warm_params):
        for omega_value in (-0.05, 0.05):
            cold = abs(coupling_retarded(omega_value, params).imag)
            hot = abs(coupling_retarded(omega_value, warm_params).imag)
            assert hot > 10 * cold

    @pytest.mark.parametrize("workers", [4, 8])
    def test_result_independent_of_worker_count(self, warm_params, omega, workers):
        serial = coupling_retarded(omega, warm_params, workers=1)
        parallel = coupling_retarded(omega, warm_params, workers=workers)
        assert np.array_equal(serial, parallel)

    def test_scalar_and_array_inputs_agree(self, params):
        values = coupling_retarded(np.array([0.01, 0.02]), params)
        assert isinstance(coupling_retarded(0.02, params), complex)
        assert coupling_retarded(0.02, params) == pytest.approx(values[1], rel=1e-14)


class TestKramersKronig:

    def test_lorentzian_pole(self):
        omega = frequency_grid(-1.0, 1.0, 2e-4)
        f = 1.0 / (omega - 0.1 + 0.01j)
        rebuilt = kramers_kronig_real(omega, f.imag)
        middle = np.abs(omega) <= 0.5
        assert np.max(np.abs(rebuilt[middle] - f.real[middle])) < 1e-2 * np.max(np.abs(f.real))

    def test_coupling_real_part_from_imaginary_part(self, params):
        omega = frequency_grid(-0.3, 0.4, 2.5e-5)
        delta = coupling_retarded(omega, params)
        rebuilt = kramers_kronig_real(omega, delta.imag)
        n = len(omega)
        interior = slice(n // 10, n - n // 10)
        error = np.max(np.abs(rebuilt[interior] - delta.real[interior]))
        assert error <= 0.02 * np.max(np.abs(delta))

    def test_rejects_mismatched_lengths(self, omega):
        with pytest.raises(ModelError):
            kramers_kronig_real(omega, np.zeros(len(omega) - 1))


class TestMatsubara:

    def test_zero_coupling(self, warm_params):
        bare = warm_params.with_coupling(0.0)
        assert coupling_matsubara(1, bare) == 0
        assert matsubara_sum_oracle(1, bare, n_trunc=10_000) == 0

    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_conjugate_symmetry(self, warm_params, m):
        assert coupling_matsubara(-m, warm_params) == pytest.approx(np.conj(coupling_matsubara(m, warm_params)),
                                                                    rel=1e-12)

    def test_static_value_is_real(self, warm_params):
        assert coupling_matsubara(0, warm_params).imag == 0

    def test_requires_positive_temperature(self, params):
        with pytest.raises(ModelError):
            coupling_matsubara(1, params)
        with pytest.raises(ModelError):
            matsubara_sum_oracle(1, params)

    def test_oracle_rejects_short_truncation(self, warm_params):
        with pytest.raises(ModelError):
            matsubara_sum_oracle(1, warm_params, n_trunc=9_999)

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [1, 2, 5, 10])
    def test_closed_form_matches_frequency_sum(self, warm_params, m):
        closed = coupling_matsubara(m, warm_params)
        brute = matsubara_sum_oracle(m, warm_params, n_trunc=200_000)
        assert abs(closed - brute) < 1e-3 * abs(brute)

    @pytest.mark.slow
    def test_frequency_sum_is_converged_in_truncation(self, warm_params):
        half = matsubara_sum_oracle(1, warm_params, n_trunc=100_000)
        full = matsubara_sum_oracle(1, warm_params, n_trunc=200_000)
        assert abs(half - full) < 5e-4 * abs(full)


class TestGoldstoneShift:

    def test_zero_coupling_has_no_shift(self, params):
        assert goldstone_shift(params.with_coupling(0.0)).U_prime_D == 0

    def test_shift_equals_zero_frequency_coupling(self, params):
        shift = goldstone_shift(params)
        assert shift.U_prime_D == pytest.approx(-8.2e-3, rel=0.02)
        assert shift.U_prime_D == coupling_retarded(0.0, params).real
        assert shift.T == 0.0

    @pytest.mark.parametrize("T", [0.0, 300.0])
    def test_shifted_coupling_has_no_real_part_at_zero(self, params, omega, T):
        delta_total, shift = shifted_coupling(params.with_temperature(T), omega)
        assert abs(delta_total.at(0.0).real) <= 1e-12
        assert shift.T == T

    def test_shift_depends_on_temperature(self, params):
        assert goldstone_shift(params).U_prime_D != goldstone_shift(params.with_temperature(300.0)).U_prime_D


class TestGrids:

    def test_frequency_grid_endpoints(self):
        grid = frequency_grid(-0.3, 0.4, 1e-4)
        assert len(grid) == 7001
        assert grid[0] == -0.3
        assert grid[-1] == pytest.approx(0.4)

    def test_uniform_step_rejects_irregular_grid(self):
        with pytest.raises(ModelError):
            uniform_step(np.array([0.0, 0.1, 0.3]))

    def test_retarded_function_lookup(self, params, narrow_omega):
        delta = coupling_on_grid(params, narrow_omega)
        assert delta.at(narrow_omega) is delta.values
        midpoint = 0.5 * (narrow_omega[10] + narrow_omega[11])
        expected = 0.5 * (delta.values[10] + delta.values[11])
        assert delta.at(midpoint) == pytest.approx(expected, rel=1e-9)
        assert delta.omega_max == pytest.approx(narrow_omega[-1])

    def test_retarded_function_is_read_only(self):
        f = RetardedFunction(0.0, 0.1, np.zeros(4))
        with pytest.raises(ValueError):
            f.values[0] = 1.0
