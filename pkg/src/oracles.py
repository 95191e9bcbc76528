# src/oracles.py
"""
ORÁCULOS INDEPENDIENTES
Referencias calculadas por otros caminos numéricos: cuadratura adaptativa,
histograma de la densidad de estados y número de magnones sin ensanchamiento
"""

import math
from typing import List

import numpy as np
from scipy.integrate import quad

from .errors import ModelError
from .model import K_B_EV, ModelParams, bose_occupation

QUAD_LIMIT = 400
HISTOGRAM_SAMPLES = 1_000_000
HISTOGRAM_BIN = 1e-5


def _energy_of_x(x: float, params: ModelParams) -> float:
    # ω^M en función de x = q/K
    return params.W_magnon * math.sin(0.5 * math.pi * x) ** 2


def _x_of_energy(energy: float, params: ModelParams) -> float:
    return 2.0 / math.pi * math.asin(math.sqrt(energy / params.W_magnon))


def _resonances(omega: float, params: ModelParams) -> List[float]:
    # valores de x donde algún denominador se acerca a cero
    points = []
    for energy in (omega - params.omega_P, omega + params.omega_P):
        if 0 < energy < params.W_magnon:
            points.append(_x_of_energy(energy, params))
    return sorted(points)


def coupling_quad(omega: float, params: ModelParams) -> complex:
    """Δ_MP(ω) por cuadratura adaptativa (scipy.integrate.quad) sobre x = q/K, con el mismo η"""
    if params.A_coupling == 0:
        return 0j

    T = params.T
    n_p = 0.0 if T == 0 else bose_occupation(params.omega_P, T)
    z = omega + 1j * params.eta

    def integrand(x: float) -> complex:
        energy = _energy_of_x(x, params)
        n_m = 0.0 if T == 0 or energy == 0 else bose_occupation(energy, T)
        value = (1.0 + n_p + n_m) / (z - params.omega_P - energy)
        if T > 0:
            value += (n_p - n_m) / (z + params.omega_P - energy)
        return 3.0 * x * x * value

    points = _resonances(omega, params) or None
    real, _ = quad(lambda x: integrand(x).real, 0.0, 1.0, points=points, limit=QUAD_LIMIT, epsabs=1e-13)
    imag, _ = quad(lambda x: integrand(x).imag, 0.0, 1.0, points=points, limit=QUAD_LIMIT, epsabs=1e-13)
    return params.A_coupling**2 * complex(real, imag)


def histogram_dos(params: ModelParams, omega: np.ndarray, samples: int = HISTOGRAM_SAMPLES,
                  bin_width: float = HISTOGRAM_BIN, chunk: int = 512) -> np.ndarray:
    """
    Densidad de estados de Fock ensanchada: muestreo estratificado q = K·u^{1/3}
    (uniforme en la medida 3q²/K³), histograma fino de ω^M_q y convolución con la Lorentziana de ancho η.
    """
    u = (np.arange(samples) + 0.5) / samples
    x = np.cbrt(u)
    energies = params.W_magnon * np.sin(0.5 * math.pi * x) ** 2

    edges = np.arange(0.0, params.W_magnon + 2 * bin_width, bin_width)
    counts, edges = np.histogram(energies, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    probability = counts / samples

    occupied = probability > 0
    centers, probability = centers[occupied], probability[occupied]

    omega = np.asarray(omega, dtype=float)
    result = np.empty(omega.shape)
    eta = params.eta
    for start in range(0, omega.size, chunk):
        block = omega[start:start + chunk]
        lorentz = (eta / math.pi) / ((block[:, None] - centers[None, :]) ** 2 + eta**2)
        result[start:start + chunk] = np.sum(lorentz * probability[None, :], axis=1)
    return result


def sharp_magnon_number(params: ModelParams) -> float:
    """∫₀^K (3q²/K³) n_B(ω^M_q) dq sin ensanchamiento; 0 a T = 0"""
    if params.T == 0:
        return 0.0

    kT = K_B_EV * params.T
    # límite x → 0 de 3x²·n_B(W sin²(πx/2))
    small_x = 12.0 * kT / (params.W_magnon * math.pi**2)

    def integrand(x: float) -> float:
        energy = _energy_of_x(x, params)
        if energy == 0:
            return small_x
        return 3.0 * x * x / math.expm1(energy / kT)

    value, _ = quad(integrand, 0.0, 1.0, limit=QUAD_LIMIT, epsabs=1e-14)
    return float(value)


def lorentzian_tail_bound(omega: np.ndarray, params: ModelParams, support: tuple, weight_sum: float) -> np.ndarray:
    """Cota 𝒜²·Σ|pesos|·η/(d² + η²) para |Im Δ_MP| a distancia d del soporte intrínseco"""
    if weight_sum < 0:
        raise ModelError("weight_sum debe ser no negativo")
    low, high = support
    omega = np.asarray(omega, dtype=float)
    distance = np.where(omega < low, low - omega, np.where(omega > high, omega - high, 0.0))
    return params.A_coupling**2 * weight_sum * params.eta / (distance**2 + params.eta**2)
