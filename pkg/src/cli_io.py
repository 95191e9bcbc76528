# src/cli_io.py
"""
CONFIGURACIÓN Y SALIDA
Lectura de archivos clave = valor, sobreescrituras --set, CSV determinista y logging
"""

import io
import math
import sys
from dataclasses import dataclass, fields, replace
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import pandas as pd
from dotenv.parser import parse_stream
from loguru import logger

from .errors import ConfigError, ModelError, OutputError
from .model import ModelParams

MIN_NODES = 64
MIN_ORACLE_TERMS = 10_000

# =====================================
# ⚙️ CONFIGURACIÓN
# =====================================


@dataclass(frozen=True)
class RunConfig:
    """Parámetros del modelo más mallas, nodos y listas propias de cada comando"""

    W_magnon: float = 0.1
    omega_P: float = 0.05
    A_coupling: float = 0.032
    eta: float = 3e-4
    T: float = 0.0
    a_lattice: float = 7.0
    omega_min: float = -0.3
    omega_max: float = 0.4
    omega_step: float = 1e-4
    quadrature_nodes: int = 512
    k_nodes: int = 256
    k_output_points: int = 200
    omega_cut: float = 3e-4
    workers: int = 1
    output_path: str = ""
    T_list: Tuple[float, ...] = tuple(25.0 * i for i in range(41))
    A_list: Tuple[float, ...] = (0.0, 0.016, 0.032, 0.064, 0.128)
    occupation_T_list: Tuple[float, ...] = (100.0, 200.0, 300.0)
    matsubara_indices: Tuple[int, ...] = (1, 2, 5, 10)
    oracle_terms: int = 200_000
    oracle_T: float = 300.0
    tc_low: float = 50.0
    tc_high: float = 3000.0

    @property
    def params(self) -> ModelParams:
        return ModelParams(
            W_magnon=self.W_magnon,
            omega_P=self.omega_P,
            A_coupling=self.A_coupling,
            eta=self.eta,
            T=self.T,
            a_lattice=self.a_lattice,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_float(key: str, text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: número mal formado {text!r}", line=line) from None


def _parse_int(key: str, text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: entero mal formado {text!r}", line=line) from None


def _parse_list(key: str, text: str, line: int, item_type) -> tuple:
    items = [item.strip() for item in text.split(',') if item.strip()]
    if not items:
        raise ConfigError(f"{key}: la lista no puede estar vacía", line=line)

    parse = _parse_int if item_type is int else _parse_float

    # "a, b, ..., c" es la progresión aritmética de a hasta c con paso b − a
    if len(items) >= 4 and items[-2] == '...' and '...' not in items[:-2]:
        start, second, stop = (parse(key, items[i], line) for i in (0, 1, -1))
        step = second - start
        if step <= 0 or stop < start:
            raise ConfigError(f"{key}: progresión inválida {text!r}", line=line)
        count = int(round((stop - start) / step)) + 1
        return tuple(item_type(start + i * step) for i in range(count))

    return tuple(parse(key, item, line) for item in items)


def _parse_value(key: str, text: Optional[str], line: int):
    field_type = _FIELD_TYPES[key]
    text = '' if text is None else text.strip()

    if field_type is str:
        return text
    if not text:
        raise ConfigError(f"{key}: falta el valor", line=line)
    if field_type is float:
        return _parse_float(key, text, line)
    if field_type is int:
        return _parse_int(key, text, line)
    item_type = int if field_type == Tuple[int, ...] else float
    return _parse_list(key, text, line, item_type)


def _validate(cfg: RunConfig, lines: Dict[str, int]) -> None:
    def fail(key: str, message: str):
        raise ConfigError(f"{key}: {message}", line=lines.get(key))

    try:
        cfg.params
    except ModelError as e:
        key = str(e).split()[0]
        raise ConfigError(str(e), line=lines.get(key)) from None

    if not cfg.omega_max > cfg.omega_min:
        fail('omega_max', f"omega_max > omega_min requerido ({cfg.omega_min}, {cfg.omega_max})")
    if not cfg.omega_step > 0 or not math.isfinite(cfg.omega_step):
        fail('omega_step', "omega_step > 0 requerido")
    if cfg.omega_step > cfg.omega_max - cfg.omega_min:
        fail('omega_step', "omega_step mayor que el rango de frecuencias")
    for key in ('quadrature_nodes', 'k_nodes'):
        if getattr(cfg, key) < MIN_NODES:
            fail(key, f"se necesitan al menos {MIN_NODES} nodos")
    if cfg.k_output_points < 2:
        fail('k_output_points', "se necesitan al menos 2 puntos")
    if cfg.workers < 1:
        fail('workers', "workers >= 1 requerido")
    if not cfg.omega_cut >= 0:
        fail('omega_cut', "omega_cut >= 0 requerido")
    if cfg.oracle_terms < MIN_ORACLE_TERMS:
        fail('oracle_terms', f"oracle_terms >= {MIN_ORACLE_TERMS} requerido")
    if not cfg.oracle_T > 0:
        fail('oracle_T', "oracle_T > 0 requerido")
    if not 0 <= cfg.tc_low < cfg.tc_high:
        fail('tc_high', "0 <= tc_low < tc_high requerido")
    if any(T < 0 for T in cfg.T_list):
        fail('T_list', "temperaturas negativas")
    if any(T <= 0 for T in cfg.occupation_T_list):
        fail('occupation_T_list', "temperaturas > 0 requeridas")
    if any(A < 0 for A in cfg.A_list):
        fail('A_list', "acoplamientos negativos")


def _binding_line(binding) -> int:
    # la marca de python-dotenv queda antes de las líneas en blanco que preceden a la clave
    original = binding.original.string
    leading = original[:len(original) - len(original.lstrip())]
    return binding.original.line + leading.count("\n")


def parse_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    """
    Documento `clave = valor` (UTF-8, comentarios con #) → RunConfig validado.

    Las claves ausentes conservan el valor de `base` (por defecto, los valores del modelo).
    """
    cfg = base if base is not None else RunConfig()
    updates = {}
    lines: Dict[str, int] = {}

    for binding in parse_stream(io.StringIO(text)):
        line = _binding_line(binding)
        if binding.error:
            raise ConfigError(f"línea ilegible {binding.original.string.strip()!r}", line=line)
        if binding.key is None:
            continue
        if binding.key not in _FIELD_TYPES:
            raise ConfigError(f"clave desconocida {binding.key!r}", line=line)

        updates[binding.key] = _parse_value(binding.key, binding.value, line)
        lines[binding.key] = line

    cfg = replace(cfg, **updates)
    _validate(cfg, lines)
    return cfg


def load_config(path: Optional[Union[str, Path]]) -> RunConfig:
    """Lee un archivo de configuración; sin ruta devuelve los valores por defecto"""
    if path is None:
        return parse_config("")

    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise OutputError(path, f"no se pudo leer la configuración ({e})") from e

    logger.info(f"📄 Configuración leída de {path}")
    return parse_config(text)


def apply_overrides(cfg: RunConfig, overrides: Sequence[str]) -> RunConfig:
    """Aplica `--set clave=valor`; el número de línea es la posición de la sobreescritura"""
    if not overrides:
        return cfg
    return parse_config("\n".join(overrides), base=cfg)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    """Documento clave = valor que parse_config devuelve como la misma RunConfig"""
    lines = ["# magphon: configuración efectiva"]
    for f in fields(RunConfig):
        lines.append(f"{f.name} = {_format_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


# =====================================
# 💾 SALIDA CSV
# =====================================

def format_float(value: float) -> str:
    """Notación científica con mantisa de 9 decimales y exponente sin relleno: 5.000000000e-1"""
    value = float(value) + 0.0
    if not math.isfinite(value):
        return repr(value)
    mantissa, exponent = f"{value:.9e}".split('e')
    return f"{mantissa}e{int(exponent)}"


def write_csv(rows: Iterable[Sequence[float]], header: Sequence[str], path: Union[str, Path]) -> Path:
    """CSV separado por comas, fin de línea LF, cabecera siempre presente; salida idéntica para entradas idénticas"""
    path = Path(path)
    frame = pd.DataFrame(list(rows), columns=list(header), dtype=float)

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=format_float, lineterminator="\n", encoding='utf-8')
    except OSError as e:
        raise OutputError(path, f"no se pudo escribir ({e.strerror or e})") from e

    logger.info(f"💾 {len(frame)} filas escritas en {path}")
    return path


# =====================================
# 📝 LOGGING
# =====================================

def setup_logging(verbose: bool = False, log_dir: Union[str, Path] = Path("data/logs")) -> None:
    """Archivo rotativo en DEBUG y consola (stderr) en INFO, o DEBUG con --verbose"""
    logger.remove()

    log_file = Path(log_dir) / f"magphon_{datetime.now():%Y%m%d}.log"
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level:<8} | {name}:{function}:{line} | {message}",
            level="DEBUG",
            rotation="10 MB",
            retention="30 days",
            compression="zip",
        )
    except OSError as e:
        raise OutputError(log_file.parent, f"no se pudo crear el directorio de logs ({e})") from e

    logger.add(
        sys.stderr,
        format="<green>{time:HH:mm:ss}</green> | <level>{level:<8}</level> | <cyan>{message}</cyan>",
        level="DEBUG" if verbose else "INFO",
    )

    logger.debug("🚀 Sistema de logging iniciado")
