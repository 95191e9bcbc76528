"""
🧲 MAGPHON - Paquete Principal
Acoplamiento magnón-fonón, espectros renormalizados, magnetización y temperatura de Curie

Versión: 1.0
"""

# =====================================
# 📦 METADATOS
# =====================================

__version__ = "1.0.0"
__author__ = "Proyecto Magphon"
__description__ = "Acoplamiento magnón-fonón y termodinámica de magnones en un modelo isotrópico 3D"

# =====================================
# 🔧 IMPORTACIONES DE MÓDULOS CORE
# =====================================

from .cli_io import RunConfig, apply_overrides, dump_config, parse_config, write_csv
from .commands import COMMANDS, run_command
from .coupling import (
    GoldstoneShift,
    RetardedFunction,
    coupling_matsubara,
    coupling_retarded,
    goldstone_shift,
    matsubara_sum_oracle,
)
from .errors import MagphonError
from .model import ElectronBand, ModelParams
from .spectra import SpectralGrid, spectral_function, total_spectral_function
from .spin_algebra import PauliCoefficients, SpinTensor4, build_bare_interaction
from .thermo import MagnetizationCurve, curie_temperature, magnetization, magnon_number

# =====================================
# 🚀 FUNCIONES DE UTILIDAD
# =====================================

def get_version():
    """Retorna la versión actual del paquete"""
    return __version__


# =====================================
# 📋 EXPORTS PÚBLICOS
# =====================================

__all__ = [
    # Tipos
    "ModelParams",
    "ElectronBand",
    "SpinTensor4",
    "PauliCoefficients",
    "RetardedFunction",
    "GoldstoneShift",
    "SpectralGrid",
    "MagnetizationCurve",
    "RunConfig",
    "MagphonError",

    # Operaciones
    "build_bare_interaction",
    "coupling_retarded",
    "coupling_matsubara",
    "matsubara_sum_oracle",
    "goldstone_shift",
    "spectral_function",
    "total_spectral_function",
    "magnon_number",
    "magnetization",
    "curie_temperature",

    # CLI
    "COMMANDS",
    "run_command",
    "parse_config",
    "dump_config",
    "apply_overrides",
    "write_csv",

    # Utilidades
    "get_version",

    # Metadatos
    "__version__",
    "__author__",
    "__description__",
]
