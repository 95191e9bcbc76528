# src/workers.py
"""
EJECUCIÓN PARALELA DETERMINISTA
Reparte una malla de frecuencias en bloques fijos y los evalúa con un pool de hilos
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np
from loguru import logger

# Tamaño de bloque fijo: la partición no depende del número de workers
CHUNK_SIZE = 256


def chunked_map(func: Callable[[np.ndarray], np.ndarray], values: np.ndarray, workers: int = 1,
                chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """
    Aplica `func` a bloques consecutivos de `values` y concatena en orden.

    Cada bloque se reduce por separado, así que el resultado es idéntico bit a bit
    para cualquier número de workers.
    """
    values = np.asarray(values)
    if values.ndim != 1:
        raise ValueError("chunked_map espera un arreglo unidimensional")

    if values.size == 0:
        return func(values)

    chunks = [values[start:start + chunk_size] for start in range(0, values.size, chunk_size)]
    workers = max(1, int(workers))

    if workers == 1 or len(chunks) == 1:
        parts = [func(chunk) for chunk in chunks]
    else:
        logger.debug(f"⚙️ {len(chunks)} bloques repartidos en {workers} workers")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, chunks))

    return np.concatenate(parts, axis=-1)
