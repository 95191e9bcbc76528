# src/spin_algebra.py
"""
ÁLGEBRA DE ESPÍN
Interacción desnuda local con simetría de cruce y su forma de Pauli
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import ModelError, NotRepresentableError

# Base de espín: "up" es el primer estado
UP, DOWN = 0, 1
SPIN_LABELS = {'up': UP, 'down': DOWN}
PAULI_LABELS = ('0', 'x', 'y', 'z')

CROSSING_ATOL = 1e-12
RECONSTRUCTION_ATOL = 1e-12

# σ^0, σ^x, σ^y, σ^z apilados: PAULI[μ, s, s']
PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
PAULI.setflags(write=False)

SpinIndex = Union[int, str]


def _spin(label: SpinIndex) -> int:
    if isinstance(label, str):
        try:
            return SPIN_LABELS[label]
        except KeyError:
            raise ModelError(f"etiqueta de espín desconocida: {label!r}") from None
    if label not in (UP, DOWN):
        raise ModelError(f"índice de espín fuera de rango: {label!r}")
    return int(label)


@dataclass(frozen=True)
class SpinTensor4:
    """Tensor v^{σ1σ2}_{σ3σ4} de 16 entradas complejas, índices en el orden (σ1, σ2, σ3, σ4)"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (2, 2, 2, 2):
            raise ModelError(f"SpinTensor4 necesita forma (2, 2, 2, 2), recibido {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ModelError("SpinTensor4 con entradas no finitas")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    def __getitem__(self, spins: Sequence[SpinIndex]) -> complex:
        s1, s2, s3, s4 = (_spin(s) for s in spins)
        return complex(self.entries[s1, s2, s3, s4])

    @classmethod
    def zeros(cls) -> "SpinTensor4":
        return cls(np.zeros((2, 2, 2, 2), dtype=complex))


@dataclass(frozen=True)
class PauliCoefficients:
    """Coeficientes v_{μ1μ2} con μ ∈ {0, x, y, z}"""

    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=complex)
        if v.shape != (4, 4):
            raise ModelError(f"PauliCoefficients necesita forma (4, 4), recibido {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, 'v', v)

    def __getitem__(self, mus: Tuple[str, str]) -> complex:
        mu1, mu2 = (PAULI_LABELS.index(str(mu)) for mu in mus)
        return complex(self.v[mu1, mu2])

    @property
    def is_diagonal(self) -> bool:
        off_diagonal = self.v - np.diag(np.diag(self.v))
        return bool(np.all(off_diagonal == 0))

    @classmethod
    def diagonal(cls, values: Sequence[complex]) -> "PauliCoefficients":
        return cls(np.diag(np.asarray(values, dtype=complex)))


# =====================================
# ⚛️ INTERACCIÓN LOCAL
# =====================================

def build_bare_interaction(U: float) -> SpinTensor4:
    """U^{σ1σ2}_{σ3σ4} = (U/2)(δ_{σ1σ2}δ_{σ3σ4} − δ_{σ1σ3}δ_{σ2σ4})"""
    if not np.isfinite(U):
        raise ModelError(f"U debe ser finito (recibido {U})")

    delta = np.eye(2)
    direct = np.einsum('ab,cd->abcd', delta, delta)
    exchange = np.einsum('ac,bd->abcd', delta, delta)
    return SpinTensor4(0.5 * U * (direct - exchange))


def check_crossing(t: SpinTensor4) -> bool:
    """True si v^{σ1σ2}_{σ3σ4} = −v^{σ1σ3}_{σ2σ4} en las 16 componentes"""
    swapped = np.transpose(t.entries, (0, 2, 1, 3))
    return bool(np.all(np.abs(t.entries + swapped) <= CROSSING_ATOL))


# =====================================
# 🧮 FORMA DE PAULI
# =====================================

def pauli_reconstruct(c: PauliCoefficients) -> SpinTensor4:
    """v^{σ1σ2}_{σ3σ4} = Σ σ^{μ1}_{σ1σ2} v_{μ1μ2} σ^{μ2}_{σ4σ3}"""
    return SpinTensor4(np.einsum('mab,mn,ndc->abcd', PAULI, c.v, PAULI))


def pauli_decompose(t: SpinTensor4, diagonal_only: bool = True) -> PauliCoefficients:
    """
    Proyección con tr(σ^μ σ^ν) = 2δ_{μν}: v_{μ1μ2} = ¼ Σ v^{σ1σ2}_{σ3σ4} σ^{μ1}_{σ2σ1} σ^{μ2}_{σ3σ4}.

    Con diagonal_only se descartan los términos μ1 ≠ μ2 y se exige que la forma
    diagonal reconstruya el tensor; si no, NotRepresentableError.
    """
    full = 0.25 * np.einsum('abcd,mab,ndc->mn', t.entries, PAULI.conj(), PAULI.conj())

    coefficients = PauliCoefficients(np.diag(np.diag(full)) if diagonal_only else full)
    residual = np.max(np.abs(pauli_reconstruct(coefficients).entries - t.entries))
    if residual > RECONSTRUCTION_ATOL:
        raise NotRepresentableError(
            f"el tensor no admite la forma de Pauli {'diagonal' if diagonal_only else 'completa'} "
            f"(residuo {residual:.2e})"
        )
    return coefficients
