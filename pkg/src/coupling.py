# src/coupling.py
"""
ACOPLAMIENTO MAGNÓN-FONÓN
Acoplamiento retardado Δ_MP(ω), su forma de Matsubara, el oráculo de suma bruta,
el corrimiento de Goldstone y la transformada de Kramers-Kronig
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from loguru import logger
from scipy.signal import fftconvolve
from scipy.special import xlogy

from .errors import ConvergenceError, ModelError
from .model import K_B_EV, ModelParams, bose_occupation, gauss_legendre_unit, magnon_energy, radial_nodes
from .workers import chunked_map

DEFAULT_NODES = 512
DEFAULT_ORACLE_TERMS = 200_000
MIN_ORACLE_TERMS = 10_000
BOSE_EXPONENT_CLIP = 600.0


@dataclass(frozen=True)
class RetardedFunction:
    """Función compleja muestreada en una malla uniforme de frecuencias reales (eV)"""

    omega_min: float
    omega_step: float
    values: np.ndarray

    def __post_init__(self):
        if not self.omega_step > 0:
            raise ModelError(f"omega_step > 0 requerido (recibido {self.omega_step})")

        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size < 2:
            raise ModelError("RetardedFunction necesita al menos dos puntos en una malla 1D")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def omega_max(self) -> float:
        return self.omega_min + (self.values.size - 1) * self.omega_step

    @property
    def omega(self) -> np.ndarray:
        return self.omega_min + self.omega_step * np.arange(self.values.size)

    def at(self, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
        """Valor en ω; interpolación lineal si ω no cae sobre la malla"""
        omega_arr = np.asarray(omega, dtype=float)
        grid = self.omega

        # la misma malla (salvo redondeo) devuelve los valores guardados sin interpolar
        if omega_arr.shape == grid.shape and np.max(np.abs(omega_arr - grid)) <= 1e-9 * self.omega_step:
            return self.values

        real = np.interp(omega_arr, grid, self.values.real)
        imag = np.interp(omega_arr, grid, self.values.imag)
        result = real + 1j * imag
        if result.ndim == 0:
            return complex(result)
        return result

    def shifted(self, constant: float) -> "RetardedFunction":
        return RetardedFunction(self.omega_min, self.omega_step, self.values - constant)


@dataclass(frozen=True)
class GoldstoneShift:
    """Corrimiento real constante 𝒰′_𝒟 que anula Re Δ_total(ω=0)"""

    U_prime_D: float
    T: float


def frequency_grid(omega_min: float, omega_max: float, omega_step: float) -> np.ndarray:
    """Malla uniforme ω_i = ω_min + i·Δω que termina en ω_max (redondeado al paso)"""
    if not omega_step > 0:
        raise ModelError(f"omega_step > 0 requerido (recibido {omega_step})")
    if not omega_max > omega_min:
        raise ModelError(f"omega_max > omega_min requerido ({omega_min}, {omega_max})")

    count = int(round((omega_max - omega_min) / omega_step)) + 1
    return omega_min + omega_step * np.arange(count)


def uniform_step(omega: np.ndarray) -> float:
    """Paso de una malla uniforme; rechaza mallas irregulares"""
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size < 2:
        raise ModelError("se necesita una malla 1D con al menos dos puntos")

    steps = np.diff(omega)
    step = (omega[-1] - omega[0]) / (omega.size - 1)
    if step <= 0 or np.max(np.abs(steps - step)) > 1e-6 * step:
        raise ModelError("la malla de frecuencias debe ser uniforme y creciente")
    return float(step)


# =====================================
# 🔗 ACOPLAMIENTO EN EL PLANO COMPLEJO
# =====================================

def _pole_weights(params: ModelParams, nodes: int) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Energías de magnón en los nodos y pesos de emisión/absorción (absorción None a T = 0)"""
    q, w = radial_nodes(params, nodes)
    omega_m = magnon_energy(q, params)

    if params.T == 0:
        return omega_m, w, None

    n_p = bose_occupation(params.omega_P, params.T)
    n_m = bose_occupation(omega_m, params.T)
    emission = w * (1.0 + n_p + n_m)
    absorption = w * (n_p - n_m)
    return omega_m, emission, absorption


def pole_weight_sum(params: ModelParams, nodes: int = DEFAULT_NODES) -> float:
    """Σ_j |pesos de emisión| + |pesos de absorción|: acota la masa total de polos de Δ_MP/𝒜²"""
    _, emission, absorption = _pole_weights(params, nodes)
    total = np.sum(np.abs(emission))
    if absorption is not None:
        total += np.sum(np.abs(absorption))
    return float(total)


def intrinsic_support(params: ModelParams) -> Tuple[float, float]:
    """Intervalo de frecuencias que contiene todos los polos de Δ_MP (sin ensanchamiento)"""
    high = params.omega_P + params.W_magnon
    if params.T == 0:
        return params.omega_P, high
    return -params.omega_P, high


def _coupling_at(z: np.ndarray, params: ModelParams, nodes: int) -> np.ndarray:
    # suma directa sobre los nodos; sólo es precisa lejos del eje real (frecuencias de Matsubara)
    z = np.asarray(z, dtype=complex)
    if params.A_coupling == 0 or z.size == 0:
        return np.zeros(z.shape, dtype=complex)

    omega_m, emission, absorption = _pole_weights(params, nodes)
    zc = z[:, None]

    values = np.sum(emission / (zc - params.omega_P - omega_m), axis=1)
    if absorption is not None:
        values = values + np.sum(absorption / (zc + params.omega_P - omega_m), axis=1)

    return params.A_coupling**2 * values


def _complex_bose(z: np.ndarray, T: float) -> np.ndarray:
    # n_B(z) = 1/(e^{z/k_B T} − 1) continuada al plano complejo
    x = np.asarray(z, dtype=complex) / (K_B_EV * T)
    x = np.clip(x.real, -BOSE_EXPONENT_CLIP, BOSE_EXPONENT_CLIP) + 1j * x.imag
    return 1.0 / np.expm1(x)


def _pole_correction(z_shifted: np.ndarray, occupation: np.ndarray, params: ModelParams,
                     nodes: int) -> np.ndarray:
    """
    Corrección de la regla de Gauss-Legendre para ∫₀¹ 3x²F(ω^M(x))/(z′ − ω^M(x)) dx.

    Las raíces c de ω^M(c) = z′ más cercanas a [0, 1] son x₀, −x₀ y 2 − x₀, con
    residuo r_c = −3c²F(z′)/ω^M′(c). Para cada una se suma r_c·(∫₀¹ dx/(x − c) − Σ_j w_j/(x_j − c)),
    de modo que la regla sólo integra el resto analítico en [0, 1].
    """
    x, w = gauss_legendre_unit(int(nodes))
    W = params.W_magnon
    root = (2.0 / math.pi) * np.arcsin(np.sqrt(z_shifted / W))

    correction = np.zeros(z_shifted.shape, dtype=complex)
    for c in (root, -root, 2.0 - root):
        slope = 0.5 * math.pi * W * np.sin(math.pi * c)
        residue = -3.0 * c**2 * occupation / slope
        exact = np.log((1.0 - c) / (-c))
        discrete = np.sum(w / (x[None, :] - c[:, None]), axis=1)
        correction += residue * (exact - discrete)
    return correction


def _retarded_block(omega: np.ndarray, params: ModelParams, nodes: int) -> np.ndarray:
    # Δ_MP(ω + iη): suma sobre nodos más la integral exacta de los polos cercanos al eje real
    omega = np.asarray(omega, dtype=float)
    if params.A_coupling == 0 or omega.size == 0:
        return np.zeros(omega.shape, dtype=complex)

    z = omega + 1j * params.eta
    values = _coupling_at(z, params, nodes)

    emission_z = z - params.omega_P
    if params.T == 0:
        correction = _pole_correction(emission_z, np.ones(z.shape), params, nodes)
    else:
        n_p = bose_occupation(params.omega_P, params.T)
        absorption_z = z + params.omega_P
        correction = _pole_correction(emission_z, 1.0 + n_p + _complex_bose(emission_z, params.T), params, nodes)
        correction += _pole_correction(absorption_z, n_p - _complex_bose(absorption_z, params.T), params, nodes)

    return values + params.A_coupling**2 * correction


def coupling_retarded(omega: Union[float, np.ndarray], params: ModelParams, nodes: int = DEFAULT_NODES,
                      workers: int = 1) -> Union[complex, np.ndarray]:
    """
    Acoplamiento retardado Δ_MP(ω) con la prescripción ω → ω + iη.

    Absorción (n_P − n^M_q)/(ω + ω_P − ω^M_q + iη) más emisión
    (1 + n_P + n^M_q)/(ω − ω_P − ω^M_q + iη), integrados con la medida 3q²/K³
    por Gauss-Legendre de orden fijo. Los polos a distancia ~η del intervalo se restan
    y se integran en forma cerrada (`_pole_correction`), así que la regla no necesita
    resolver la escala η. A T = 0 sólo queda la emisión.
    """
    omega_arr = np.asarray(omega, dtype=float)
    scalar = omega_arr.ndim == 0
    omega_flat = np.atleast_1d(omega_arr).ravel()

    values = chunked_map(lambda chunk: _retarded_block(chunk, params, nodes), omega_flat, workers=workers)

    if scalar:
        return complex(values[0])
    return values.reshape(omega_arr.shape)


def coupling_on_grid(params: ModelParams, omega: np.ndarray, nodes: int = DEFAULT_NODES,
                     workers: int = 1) -> RetardedFunction:
    """Δ_MP muestreado en una malla uniforme"""
    step = uniform_step(omega)
    logger.debug(f"🔗 Δ_MP en {len(omega)} frecuencias × {nodes} nodos (T={params.T} K, 𝒜={params.A_coupling} eV)")
    values = coupling_retarded(np.asarray(omega, dtype=float), params, nodes=nodes, workers=workers)
    return RetardedFunction(float(omega[0]), step, values)


def coupling_matsubara(m: int, params: ModelParams, nodes: int = DEFAULT_NODES) -> complex:
    """Forma cerrada de Δ_MP evaluada en la frecuencia bosónica iω_m = 2πi·m/β"""
    if params.T <= 0:
        raise ModelError("las frecuencias de Matsubara requieren T > 0")

    omega_m = 2.0 * math.pi * int(m) * K_B_EV * params.T
    return complex(_coupling_at(np.array([1j * omega_m]), params, nodes)[0])


def matsubara_sum_oracle(m: int, params: ModelParams, n_trunc: int = DEFAULT_ORACLE_TERMS,
                         nodes: int = DEFAULT_NODES, chunk: int = 2048) -> complex:
    """
    Suma bruta sobre frecuencias bosónicas del producto magnón de Fock × fonón adiabático:

        −(𝒜²/β) Σ_{n=−N..N} ∫ (3q²/K³) [1/(iω_m − iω_n − ω^M_q)] [2ω_P/((iω_n)² − ω_P²)] dq
    """
    if params.T <= 0:
        raise ModelError("el oráculo de Matsubara requiere T > 0")
    if n_trunc < MIN_ORACLE_TERMS:
        raise ModelError(f"N_trunc >= {MIN_ORACLE_TERMS} requerido (recibido {n_trunc})")
    if params.A_coupling == 0:
        return 0j

    kT = K_B_EV * params.T
    q, w = radial_nodes(params, nodes)
    omega_m = magnon_energy(q, params)
    nu_external = 2.0 * math.pi * int(m) * kT

    per_node = np.zeros(omega_m.shape, dtype=complex)
    for start in range(-n_trunc, n_trunc + 1, chunk):
        n = np.arange(start, min(start + chunk, n_trunc + 1), dtype=float)
        nu = 2.0 * math.pi * n * kT
        phonon = -2.0 * params.omega_P / (nu**2 + params.omega_P**2)
        magnon = 1.0 / (1j * (nu_external - nu)[:, None] - omega_m[None, :])
        per_node += np.sum(phonon[:, None] * magnon, axis=0)

    return complex(-params.A_coupling**2 * kT * np.sum(w * per_node))


def resonant_frequencies(params: ModelParams) -> np.ndarray:
    """ω = 0 y frecuencias dentro de la ventana de emisión (y de absorción si T > 0)"""
    emission = params.omega_P + params.W_magnon * np.array([0.25, 0.503, 0.9])
    if params.T == 0:
        return np.concatenate([[0.0], emission])
    absorption = -params.omega_P + params.W_magnon * np.array([0.3, 0.7])
    return np.concatenate([[0.0], absorption, emission])


def check_quadrature_convergence(omega: float, params: ModelParams, nodes: int = DEFAULT_NODES,
                                 rtol: float = 1e-6) -> float:
    """Compara Δ_MP(ω) con n y 2n nodos; lanza ConvergenceError si el cambio relativo supera rtol"""
    coarse = coupling_retarded(omega, params, nodes=nodes)
    fine = coupling_retarded(omega, params, nodes=2 * nodes)

    scale = abs(fine)
    change = abs(fine - coarse) / scale if scale > 0 else abs(fine - coarse)
    if change > rtol:
        raise ConvergenceError(
            f"Δ_MP({omega} eV) cambia {change:.2e} (relativo) al pasar de {nodes} a {2 * nodes} nodos"
        )
    return change


# =====================================
# 🎯 CRITERIO DE GOLDSTONE
# =====================================

def goldstone_shift(params: ModelParams, nodes: int = DEFAULT_NODES) -> GoldstoneShift:
    """𝒰′_𝒟 = Re Δ_MP(0): el corrimiento que deja Re Δ_total(0) = 0 a esta temperatura"""
    value = coupling_retarded(0.0, params, nodes=nodes)
    return GoldstoneShift(U_prime_D=float(value.real), T=params.T)


def shifted_coupling(params: ModelParams, omega: np.ndarray, nodes: int = DEFAULT_NODES,
                     workers: int = 1) -> Tuple[RetardedFunction, GoldstoneShift]:
    """Δ_total(ω) = Δ_MP(ω) − 𝒰′_𝒟 en la malla, junto con el corrimiento usado"""
    delta = coupling_on_grid(params, omega, nodes=nodes, workers=workers)
    shift = goldstone_shift(params, nodes=nodes)
    logger.debug(f"🎯 Goldstone: 𝒰′_𝒟 = {shift.U_prime_D:.6e} eV a T={params.T} K")
    return delta.shifted(shift.U_prime_D), shift


# =====================================
# 🔁 KRAMERS-KRONIG
# =====================================

def _hilbert_kernel(n: int) -> np.ndarray:
    # PV ∫ hat(s)/(s + m) ds para la función sombrero de interpolación lineal
    m = np.arange(-(n - 1), n, dtype=float)
    return xlogy(m + 1, np.abs(m + 1)) - 2.0 * xlogy(m, np.abs(m)) + xlogy(m - 1, np.abs(m - 1))


def kramers_kronig_real(omega: np.ndarray, im_values: np.ndarray) -> np.ndarray:
    """
    Re f(ω) = (1/π) PV ∫ Im f(ω')/(ω' − ω) dω' sobre la malla.

    El núcleo es exacto para Im f lineal a trozos; fuera de la malla se asume Im f = 0.
    """
    uniform_step(omega)
    im_values = np.asarray(im_values, dtype=float)
    n = im_values.size
    if n != len(omega):
        raise ModelError("omega e Im f deben tener la misma longitud")

    convolution = fftconvolve(im_values, _hilbert_kernel(n), mode='full')
    return -convolution[n - 1:2 * n - 1] / math.pi
