# src/thermo.py
"""
TERMODINÁMICA DE MAGNONES
Espectro ocupado n_B·A, número de magnones, magnetización m(T) y temperatura de Curie
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid
from scipy.optimize import bisect

from .coupling import DEFAULT_NODES, GoldstoneShift, goldstone_shift, shifted_coupling, uniform_step
from .errors import BracketError, ModelError
from .model import ModelParams, bose_occupation
from .spectra import total_spectral_function

M_ZERO = 0.5
NOISE_FRACTION = 1e-6
TC_BRACKET = (50.0, 3000.0)
TC_MAX = 1e4
TC_XTOL = 0.25


@dataclass(frozen=True)
class MagnetizationSample:
    T: float
    m: float
    n_B_A_integral: float
    U_prime_D: float


@dataclass
class MagnetizationCurve:
    """Muestras de m(T) para un 𝒜 fijo, con el corrimiento de Goldstone usado en cada T"""

    A_coupling: float
    samples: List[MagnetizationSample] = field(default_factory=list)

    @property
    def temperatures(self) -> np.ndarray:
        return np.array([s.T for s in self.samples])

    @property
    def magnetization(self) -> np.ndarray:
        return np.array([s.m for s in self.samples])

    def is_monotone_until_zero(self) -> bool:
        """m no crece entre muestras consecutivas hasta el primer cruce por cero"""
        m = self.magnetization[np.argsort(self.temperatures)]
        for previous, current in zip(m[:-1], m[1:]):
            if previous <= 0:
                break
            if current > previous:
                return False
        return True


# =====================================
# 🌡️ ESPECTRO OCUPADO
# =====================================

def thermal_weight(omega: np.ndarray, T: float, omega_cut: float) -> np.ndarray:
    """
    Peso térmico del espectro: n_B(ω) para ω > 0 y n_B(ω) + 1 = −n_B(|ω|) para ω < 0.

    La parte de vacío queda fuera, así que el peso es idénticamente cero a T = 0.
    |ω| < ω_cut se excluye (peso 0).
    """
    if omega_cut < 0:
        raise ModelError(f"omega_cut >= 0 requerido (recibido {omega_cut})")

    omega = np.asarray(omega, dtype=float)
    weight = np.zeros(omega.shape)
    if T == 0:
        return weight

    keep = (np.abs(omega) >= omega_cut) & (omega != 0)
    weight[keep] = np.sign(omega[keep]) * bose_occupation(np.abs(omega[keep]), T)
    return weight


def _occupied(omega: np.ndarray, T: float, a_total: np.ndarray, omega_cut: float) -> Tuple[np.ndarray, int]:
    # producto peso·A; los negativos de ruido se recortan, los demás se conservan y se cuentan
    product = thermal_weight(omega, T, omega_cut) * np.asarray(a_total, dtype=float)
    peak = np.max(np.abs(product)) if product.size else 0.0
    if peak == 0:
        return product, 0

    noise = (product < 0) & (product >= -NOISE_FRACTION * peak)
    product[noise] = 0.0
    return product, int(np.count_nonzero(product < 0))


def occupied_spectrum(omega: np.ndarray, T: float, a_total: np.ndarray, omega_cut: float) -> np.ndarray:
    """n_B(ω,T)·A^M_total(ω) con el peso térmico de `thermal_weight`"""
    product, negatives = _occupied(omega, T, a_total, omega_cut)
    if negatives:
        logger.warning(f"⚠️ {negatives} valores negativos en n_B·A por encima del umbral de ruido (T={T} K)")
    return product


# =====================================
# 🧲 MAGNETIZACIÓN
# =====================================

def spectrum_at_temperature(params: ModelParams, omega: np.ndarray, nodes: int = DEFAULT_NODES,
                            workers: int = 1) -> Tuple[np.ndarray, GoldstoneShift]:
    """Espectro total renormalizado con el corrimiento de Goldstone de params.T"""
    delta_total, shift = shifted_coupling(params, omega, nodes=nodes, workers=workers)
    a_total = total_spectral_function(params, omega, delta_total, nodes=nodes, workers=workers)
    return a_total, shift


def magnon_number(params: ModelParams, omega: np.ndarray, omega_cut: Optional[float] = None,
                  nodes: int = DEFAULT_NODES, workers: int = 1) -> Tuple[float, GoldstoneShift]:
    """∫ n_B(ω)A^M(ω) dω (trapecio, |ω| < ω_cut excluido) y el corrimiento usado; 0 exacto a T = 0"""
    step = uniform_step(omega)
    cut = params.eta if omega_cut is None else omega_cut

    if params.T == 0:
        return 0.0, goldstone_shift(params, nodes=nodes)

    a_total, shift = spectrum_at_temperature(params, omega, nodes=nodes, workers=workers)
    product, negatives = _occupied(omega, params.T, a_total, cut)
    if negatives:
        logger.debug(f"n_B·A: {negatives} valores negativos conservados (T={params.T} K)")

    return float(trapezoid(product, dx=step)), shift


def magnetization(params: ModelParams, omega: np.ndarray, omega_cut: Optional[float] = None,
                  nodes: int = DEFAULT_NODES, workers: int = 1) -> float:
    """m(T) = 0.5 − número de magnones, en gμ_B por celda"""
    number, _ = magnon_number(params, omega, omega_cut=omega_cut, nodes=nodes, workers=workers)
    return M_ZERO - number


def magnetization_curve(params: ModelParams, temperatures: Sequence[float], omega: np.ndarray,
                        omega_cut: Optional[float] = None, nodes: int = DEFAULT_NODES,
                        workers: int = 1) -> MagnetizationCurve:
    """m(T) sobre una lista de temperaturas; Δ_MP y 𝒰′_𝒟 se recalculan en cada una"""
    curve = MagnetizationCurve(A_coupling=params.A_coupling)
    for T in temperatures:
        number, shift = magnon_number(params.with_temperature(T), omega, omega_cut=omega_cut,
                                      nodes=nodes, workers=workers)
        curve.samples.append(MagnetizationSample(T=float(T), m=M_ZERO - number,
                                                 n_B_A_integral=number, U_prime_D=shift.U_prime_D))
        logger.debug(f"🌡️ T={T} K: m={M_ZERO - number:.6f}")
    return curve


def magnon_number_exponent(temperatures: Sequence[float], numbers: Sequence[float]) -> float:
    """Pendiente de mínimos cuadrados de log n vs log T"""
    T = np.asarray(temperatures, dtype=float)
    n = np.asarray(numbers, dtype=float)
    if T.size < 2 or np.any(T <= 0) or np.any(n <= 0):
        raise ModelError("el ajuste log-log necesita al menos dos puntos con T > 0 y n > 0")

    slope, _ = np.polyfit(np.log(T), np.log(n), 1)
    return float(slope)


# =====================================
# 🔥 TEMPERATURA DE CURIE
# =====================================

def curie_temperature(params: ModelParams, omega: np.ndarray, omega_cut: Optional[float] = None,
                      nodes: int = DEFAULT_NODES, workers: int = 1,
                      bracket: Tuple[float, float] = TC_BRACKET) -> float:
    """
    Raíz de m(T) = 0 por bisección.

    Si m sigue positiva en el extremo alto, éste se duplica hasta 10⁴ K;
    sin cambio de signo se lanza BracketError.
    """
    low, high = float(bracket[0]), float(bracket[1])
    if not 0 <= low < high:
        raise ModelError(f"intervalo de T_c inválido: [{low}, {high}]")

    def m_of_T(T: float) -> float:
        value = magnetization(params.with_temperature(T), omega, omega_cut=omega_cut, nodes=nodes, workers=workers)
        logger.debug(f"🔥 bisección 𝒜={params.A_coupling} eV: m({T:.2f} K) = {value:.6f}")
        return value

    m_low = m_of_T(low)
    if m_low <= 0:
        raise BracketError(f"m({low} K) = {m_low:.4f} no es positiva; no hay intervalo para T_c")

    m_high = m_of_T(high)
    while m_high > 0:
        if high >= TC_MAX:
            raise BracketError(f"m sigue positiva hasta {high} K (𝒜={params.A_coupling} eV)")
        high = min(2.0 * high, TC_MAX)
        m_high = m_of_T(high)

    root = bisect(m_of_T, low, high, xtol=TC_XTOL)
    logger.info(f"🔥 T_c = {root:.2f} K para 𝒜 = {params.A_coupling} eV")
    return float(root)


def curie_sweep(params: ModelParams, couplings: Sequence[float], omega: np.ndarray,
                omega_cut: Optional[float] = None, nodes: int = DEFAULT_NODES, workers: int = 1,
                bracket: Tuple[float, float] = TC_BRACKET) -> List[Tuple[float, float]]:
    """T_c para cada 𝒜 de la lista, en orden"""
    return [
        (float(A), curie_temperature(params.with_coupling(A), omega, omega_cut=omega_cut,
                                     nodes=nodes, workers=workers, bracket=bracket))
        for A in couplings
    ]


def interior_minimum(values: Sequence[float]) -> bool:
    """True si el mínimo de la secuencia no está en ninguno de los extremos"""
    values = list(values)
    if len(values) < 3:
        return False
    i = int(np.argmin(values))
    return 0 < i < len(values) - 1 and math.isfinite(values[i])
