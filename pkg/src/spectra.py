# src/spectra.py
"""
ESPECTROS DE MAGNONES
Propagadores de Fock y renormalizado, funciones espectrales A(k,ω) y espectro total
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from .coupling import RetardedFunction, uniform_step
from .errors import ModelError
from .model import ModelParams, magnon_energy, radial_nodes, sphere_radius
from .workers import chunked_map

DEFAULT_K_NODES = 256
DEFAULT_TOTAL_NODES = 512


@dataclass(frozen=True)
class SpectralGrid:
    """A(k,ω) con signo en una malla producto: nodos de Gauss-Legendre en k × malla uniforme en ω"""

    k_nodes: np.ndarray
    k_weights: np.ndarray
    omega_min: float
    omega_step: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != len(self.k_nodes):
            raise ModelError("SpectralGrid: values debe tener forma (n_k, n_ω)")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def omega(self) -> np.ndarray:
        return self.omega_min + self.omega_step * np.arange(self.values.shape[1])

    def sum_rule(self) -> np.ndarray:
        """∫ A(k,ω) dω por nodo k (regla del trapecio sobre toda la malla)"""
        return trapezoid(self.values, dx=self.omega_step, axis=1)

    def total(self) -> np.ndarray:
        """Promedio radial Σ_j w_j A(k_j, ω) con la medida 3k²/K³ de los nodos"""
        return np.sum(self.k_weights[:, None] * self.values, axis=0)


# =====================================
# 🧲 PROPAGADORES
# =====================================

def fock_magnon_retarded(k: Union[float, np.ndarray], omega: Union[float, np.ndarray],
                         params: ModelParams) -> Union[complex, np.ndarray]:
    """Magnón de Fock r(k,ω) = 1/(ω − ω^M_k + iη); k y ω se combinan con broadcasting de numpy"""
    omega_k = magnon_energy(k, params)
    result = 1.0 / (np.asarray(omega, dtype=float) - omega_k + 1j * params.eta)
    if np.ndim(result) == 0:
        return complex(result)
    return result


def _dyson(r: np.ndarray, delta: Optional[np.ndarray]) -> np.ndarray:
    # Δ idénticamente nulo deja r intacto
    if delta is None or not np.any(delta):
        return r
    return r / (1.0 - r * delta)


def renormalized_magnon_retarded(k: Union[float, np.ndarray], omega: Union[float, np.ndarray],
                                 delta_total: Optional[RetardedFunction],
                                 params: ModelParams) -> Union[complex, np.ndarray]:
    """
    Magnón renormalizado ℛ = r/(1 − r·Δ_total).

    Δ_total ≡ 0 (o None) devuelve r sin tocar, así que 𝒜 = 0 reproduce el magnón de Fock bit a bit.
    """
    r = fock_magnon_retarded(k, omega, params)
    delta = None if delta_total is None else delta_total.at(np.asarray(omega, dtype=float))

    result = _dyson(r, delta)
    if np.ndim(result) == 0:
        return complex(result)
    return result


def spectral_function(k: Union[float, np.ndarray], omega: Union[float, np.ndarray],
                      delta_total: Optional[RetardedFunction],
                      params: ModelParams) -> Union[float, np.ndarray]:
    """A^M(k,ω) = −(1/π) Im ℛ(k,ω), con signo"""
    result = -np.imag(renormalized_magnon_retarded(k, omega, delta_total, params)) / np.pi
    if np.ndim(result) == 0:
        return float(result)
    return result


# =====================================
# 📊 MALLAS ESPECTRALES
# =====================================

def _spectral_block(k: np.ndarray, omega: np.ndarray, delta_total: Optional[RetardedFunction],
                    params: ModelParams):
    # bloque (n_k, n_ω) de A(k,ω) para un trozo de índices de frecuencia
    omega = np.asarray(omega, dtype=float)
    delta = None if delta_total is None else np.asarray(delta_total.at(omega))

    def block(index: np.ndarray) -> np.ndarray:
        r = fock_magnon_retarded(k[:, None], omega[index][None, :], params)
        return -np.imag(_dyson(r, None if delta is None else delta[index][None, :])) / np.pi
    return block


def spectral_map(params: ModelParams, k: np.ndarray, omega: np.ndarray, delta_total: Optional[RetardedFunction],
                 workers: int = 1) -> np.ndarray:
    """A(k,ω) con signo para cada k de la lista (filas) y cada ω de la malla (columnas)"""
    block = _spectral_block(np.asarray(k, dtype=float), omega, delta_total, params)
    return chunked_map(block, np.arange(len(omega)), workers=workers)


def build_spectral_grid(params: ModelParams, omega: np.ndarray, delta_total: Optional[RetardedFunction],
                        k_nodes: int = DEFAULT_K_NODES, workers: int = 1) -> SpectralGrid:
    """A(k,ω) en n_k nodos de Gauss-Legendre sobre [0, K] y la malla de frecuencias dada"""
    step = uniform_step(omega)
    k, weights = radial_nodes(params, k_nodes)

    logger.debug(f"📊 Malla espectral {k_nodes} k × {len(omega)} ω")
    values = spectral_map(params, k, omega, delta_total, workers=workers)
    return SpectralGrid(k_nodes=k, k_weights=weights, omega_min=float(omega[0]), omega_step=step, values=values)


def total_spectral_function(params: ModelParams, omega: np.ndarray, delta_total: Optional[RetardedFunction],
                            nodes: int = DEFAULT_TOTAL_NODES, workers: int = 1) -> np.ndarray:
    """A^M(ω) = ∫₀^K (3k²/K³) A^M(k,ω) dk por Gauss-Legendre"""
    uniform_step(omega)
    k, weights = radial_nodes(params, nodes)
    block = _spectral_block(k, omega, delta_total, params)

    def reduce(index: np.ndarray) -> np.ndarray:
        return np.sum(weights[:, None] * block(index), axis=0)

    return chunked_map(reduce, np.arange(len(omega)), workers=workers)


def fock_total_spectral_function(params: ModelParams, omega: np.ndarray, nodes: int = DEFAULT_TOTAL_NODES,
                                 workers: int = 1) -> np.ndarray:
    """Espectro total de los magnones de Fock: la densidad de estados ensanchada con η"""
    return total_spectral_function(params, omega, None, nodes=nodes, workers=workers)


def uniform_k_grid(params: ModelParams, points: int) -> np.ndarray:
    """Malla uniforme de `points` valores de k en [0, K] para la salida"""
    if points < 2:
        raise ModelError(f"se necesitan al menos 2 puntos en k (recibido {points})")
    return np.linspace(0.0, sphere_radius(params), points)


# =====================================
# 🔍 PICOS
# =====================================

def locate_peak(omega: np.ndarray, values: np.ndarray,
                window: Optional[Tuple[float, float]] = None) -> Tuple[float, float]:
    """
    Máximo de `values` refinado con una parábola por los tres puntos alrededor del máximo de la malla.

    Con `window` sólo se busca dentro de [ω_a, ω_b]; así se aísla el pico de Goldstone
    cuando otra rama del espectro es más alta.
    """
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        mask = (omega >= window[0]) & (omega <= window[1])
        if mask.sum() < 3:
            raise ModelError(f"la ventana {window} contiene menos de tres puntos de la malla")
        omega, values = omega[mask], values[mask]

    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        return float(omega[i]), float(values[i])
    return _parabolic_vertex(omega, values, i)


def _parabolic_vertex(omega: np.ndarray, values: np.ndarray, i: int) -> Tuple[float, float]:
    left, center, right = values[i - 1], values[i], values[i + 1]
    curvature = left - 2.0 * center + right
    if curvature >= 0:
        return float(omega[i]), float(center)

    step = omega[i + 1] - omega[i]
    offset = 0.5 * (left - right) / curvature
    peak_value = center - 0.25 * (left - right) * offset
    return float(omega[i] + offset * step), float(peak_value)


def local_maxima(omega: np.ndarray, values: np.ndarray, window: Optional[Tuple[float, float]] = None,
                 prominence_fraction: float = 0.05) -> List[float]:
    """Posiciones (refinadas) de los máximos locales con prominencia ≥ fracción del máximo en la ventana"""
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)

    mask = np.ones(omega.shape, dtype=bool)
    if window is not None:
        mask = (omega >= window[0]) & (omega <= window[1])
    if mask.sum() < 3:
        return []

    sub_omega = omega[mask]
    sub_values = values[mask]
    peaks, _ = find_peaks(sub_values, prominence=prominence_fraction * np.max(sub_values))
    return [_parabolic_vertex(sub_omega, sub_values, int(i))[0] for i in peaks]


def goldstone_peak(omega: np.ndarray, delta_total: RetardedFunction, params: ModelParams) -> float:
    """Posición del pico de A(k=0, ω) buscado en |ω| ≤ ω_P/2"""
    values = spectral_function(0.0, omega, delta_total, params)
    half = 0.5 * params.omega_P
    peak, _ = locate_peak(omega, values, window=(-half, half))
    return peak
