# src/model.py
"""
MODELO ISOTRÓPICO MAGPHON
Parámetros físicos, dispersión de magnones, ocupaciones y medida radial normalizada
"""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import expit

from .errors import ModelError

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Constante de Boltzmann CODATA en eV/K
K_B_EV = 8.617333262e-5


@dataclass(frozen=True)
class ModelParams:
    """Entradas físicas del modelo (energías en eV, temperatura en K, red en unidades atómicas)"""

    W_magnon: float = 0.1
    omega_P: float = 0.05
    A_coupling: float = 0.032
    eta: float = 3e-4
    T: float = 0.0
    a_lattice: float = 7.0

    def __post_init__(self):
        values = {
            'W_magnon': self.W_magnon,
            'omega_P': self.omega_P,
            'A_coupling': self.A_coupling,
            'eta': self.eta,
            'T': self.T,
            'a_lattice': self.a_lattice,
        }
        for name, value in values.items():
            if not math.isfinite(value):
                raise ModelError(f"{name} debe ser finito (recibido {value})")

        if self.W_magnon <= 0:
            raise ModelError(f"W_magnon > 0 requerido (recibido {self.W_magnon})")
        if self.omega_P <= 0:
            raise ModelError(f"omega_P > 0 requerido (recibido {self.omega_P})")
        if self.eta <= 0:
            raise ModelError(f"eta > 0 requerido (recibido {self.eta})")
        if self.A_coupling < 0:
            raise ModelError(f"A_coupling >= 0 requerido (recibido {self.A_coupling})")
        if self.T < 0:
            raise ModelError(f"T >= 0 requerido (recibido {self.T})")
        if self.a_lattice <= 0:
            raise ModelError(f"a_lattice > 0 requerido (recibido {self.a_lattice})")

    def with_temperature(self, T: float) -> "ModelParams":
        return replace(self, T=float(T))

    def with_coupling(self, A_coupling: float) -> "ModelParams":
        return replace(self, A_coupling=float(A_coupling))

    @property
    def beta(self) -> float:
        """Temperatura inversa en 1/eV (infinita a T=0)"""
        if self.T == 0:
            return math.inf
        return 1.0 / (K_B_EV * self.T)


@dataclass(frozen=True)
class ElectronBand:
    """Niveles electrónicos discretos (ξ relativo al potencial químico, peso) para el promedio de zona"""

    levels: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        levels = tuple((float(xi), float(weight)) for xi, weight in self.levels)
        object.__setattr__(self, 'levels', levels)

        if not levels:
            raise ModelError("ElectronBand necesita al menos un nivel")
        if any(weight <= 0 for _, weight in levels):
            raise ModelError("los pesos de ElectronBand deben ser positivos")

        total = math.fsum(weight for _, weight in levels)
        if abs(total - 1.0) > 1e-12:
            raise ModelError(f"los pesos deben sumar 1 (suman {total!r})")

    @property
    def energies(self) -> np.ndarray:
        return np.array([xi for xi, _ in self.levels])

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.levels])


# =====================================
# 🌐 ESFERA DE BRILLOUIN
# =====================================

def sphere_radius(params: ModelParams) -> float:
    """Radio K = π/a de la esfera que reemplaza la zona de Brillouin"""
    return math.pi / params.a_lattice


def brillouin_volume(params: ModelParams) -> float:
    """Volumen Ω_BZ = 4πK³/3; con él la medida radial 3q²/K³ integra exactamente 1"""
    K = sphere_radius(params)
    return 4.0 * math.pi * K**3 / 3.0


def radial_measure(q: ArrayLike, params: ModelParams) -> np.ndarray:
    """Densidad 4πq²/Ω_BZ = 3q²/K³ de la medida radial normalizada"""
    K = sphere_radius(params)
    q = np.asarray(q, dtype=float)
    return 3.0 * q**2 / K**3


@lru_cache(maxsize=32)
def gauss_legendre_unit(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss-Legendre llevados a [0, 1]"""
    x, w = leggauss(n)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def radial_nodes(params: ModelParams, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodos q_j en [0, K] y pesos w_j que ya incluyen la medida 3q²/K³.

    Σ_j w_j f(q_j) ≈ ∫₀^K (3q²/K³) f(q) dq, con Σ_j w_j = 1 hasta redondeo.
    """
    if n < 2:
        raise ModelError(f"se necesitan al menos 2 nodos de cuadratura (recibido {n})")

    x, w = gauss_legendre_unit(int(n))
    K = sphere_radius(params)
    q = K * x
    weights = 3.0 * x**2 * w
    return q, weights


# =====================================
# 🧲 DISPERSIÓN Y OCUPACIONES
# =====================================

def magnon_energy(q: ArrayLike, params: ModelParams) -> Union[float, np.ndarray]:
    """Dispersión de Fock ω^M_q = W·sin²(qπ/2K), definida en 0 ≤ q ≤ K"""
    K = sphere_radius(params)
    q_arr = np.asarray(q, dtype=float)

    slack = 1e-12 * K
    if np.any(q_arr < -slack) or np.any(q_arr > K + slack) or not np.all(np.isfinite(q_arr)):
        raise ModelError(f"q fuera de [0, K={K:.6g}]")

    q_arr = np.clip(q_arr, 0.0, K)
    energy = params.W_magnon * np.sin(q_arr * math.pi / (2.0 * K)) ** 2

    if energy.ndim == 0:
        return float(energy)
    return energy


def bose_occupation(omega: ArrayLike, T: float) -> Union[float, np.ndarray]:
    """
    Ocupación de Bose n_B(ω) = 1/(e^{ω/k_B T} − 1).

    A T = 0 devuelve el límite 0 para ω > 0 y −1 para ω < 0 (n_B(−ω) = −1 − n_B(ω)).
    ω = 0 es singular y se rechaza.
    """
    if T < 0 or not math.isfinite(T):
        raise ModelError(f"temperatura inválida: {T}")

    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr == 0):
        raise ModelError("n_B es singular en ω = 0")

    if T == 0:
        occupation = np.where(omega_arr > 0, 0.0, -1.0)
    else:
        x = omega_arr / (K_B_EV * T)
        with np.errstate(over='ignore'):
            occupation = 1.0 / np.expm1(x)

    if occupation.ndim == 0:
        return float(occupation)
    return occupation


def fermi_occupation(xi: ArrayLike, T: float) -> Union[float, np.ndarray]:
    """Ocupación de Fermi 1/(e^{ξ/k_B T} + 1); a T = 0 es un escalón con valor 1/2 en ξ = 0"""
    if T < 0 or not math.isfinite(T):
        raise ModelError(f"temperatura inválida: {T}")

    xi_arr = np.asarray(xi, dtype=float)
    if T == 0:
        occupation = np.where(xi_arr < 0, 1.0, np.where(xi_arr > 0, 0.0, 0.5))
    else:
        occupation = expit(-xi_arr / (K_B_EV * T))

    if occupation.ndim == 0:
        return float(occupation)
    return occupation


# =====================================
# ⚛️ FUNCIÓN DE GREEN PROMEDIADA
# =====================================

def gbar(band: ElectronBand, T: float) -> float:
    """Ḡσ = Σ pesos · (n_F(ξ) − 1/2)/|ξ|, en 1/eV"""
    xi = band.energies
    if np.any(xi == 0):
        raise ModelError("Ḡ no admite niveles con ξ = 0")

    terms = band.weights * (fermi_occupation(xi, T) - 0.5) / np.abs(xi)
    return math.fsum(terms)


def coupling_strength(U: float, gbar_up: float, gbar_down: float, g2_avg: float) -> float:
    """Intensidad magnón-fonón 𝒜 = U·|Ḡ↑ + Ḡ↓|·sqrt(ḡ²)"""
    for name, value in (('U', U), ('gbar_up', gbar_up), ('gbar_down', gbar_down), ('g2_avg', g2_avg)):
        if not math.isfinite(value):
            raise ModelError(f"{name} debe ser finito (recibido {value})")
    if g2_avg < 0:
        raise ModelError(f"ḡ² >= 0 requerido (recibido {g2_avg})")

    return abs(U) * abs(gbar_up + gbar_down) * math.sqrt(g2_avg)
