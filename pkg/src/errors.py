# src/errors.py
"""
ERRORES MAGPHON
Jerarquía de excepciones; cada clase conoce su código de salida del CLI
"""

from pathlib import Path
from typing import Optional, Union


class MagphonError(Exception):
    """Error base del sistema"""

    exit_code = 1


class ConfigError(MagphonError):
    """Configuración inválida (clave desconocida, número mal formado o invariante violado)"""

    exit_code = 1

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"línea {line}: {message}"
        super().__init__(message)


class ModelError(MagphonError, ValueError):
    """Parámetros físicos fuera de dominio"""

    exit_code = 1


class NumericalError(MagphonError):
    """Fallo de una verificación numérica"""

    exit_code = 2


class ConvergenceError(NumericalError):
    """La cuadratura cambia demasiado al duplicar nodos"""


class BracketError(NumericalError):
    """La bisección de T_c no encuentra cambio de signo"""


class NotRepresentableError(NumericalError):
    """El tensor no admite la forma de Pauli diagonal"""


class SelfTestError(NumericalError):
    """Alguna verificación del selftest u oráculo falló"""


class TrendError(NumericalError):
    """T_c(𝒜) no presenta mínimo interior en la lista de acoplamientos"""


class OutputError(MagphonError):
    """Error de entrada/salida; siempre nombra la ruta"""

    exit_code = 3

    def __init__(self, path: Union[str, Path], reason: str):
        self.path = Path(path)
        super().__init__(f"{self.path}: {reason}")
