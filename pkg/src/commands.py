# src/commands.py
"""
COMANDOS MAGPHON
Un método por comando del CLI; cada uno escribe su CSV y devuelve la ruta
"""

from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from loguru import logger

from .cli_io import RunConfig, write_csv
from .coupling import coupling_matsubara, coupling_on_grid, frequency_grid, matsubara_sum_oracle, shifted_coupling
from .errors import ConfigError, SelfTestError, TrendError
from .model import sphere_radius
from .spectra import build_spectral_grid, fock_total_spectral_function, spectral_map, uniform_k_grid
from .thermo import curie_sweep, interior_minimum, magnetization_curve, occupied_spectrum, spectrum_at_temperature
from .validator import MagphonValidator

COMMANDS = ('coupling', 'spectrum', 'dos', 'magnetization', 'curie', 'oracle', 'occupation', 'selftest')
ORACLE_RTOL = 1e-3

HEADERS = {
    'coupling': ["omega_eV", "re_delta_eV", "im_delta_eV"],
    'spectrum': ["k_over_K", "omega_eV", "A_signed", "A_magnitude"],
    'dos': ["omega_eV", "A_total", "A_total_magnitude"],
    'magnetization': ["T_K", "m", "n_B_A_integral", "U_prime_D_eV"],
    'curie': ["A_eV", "Tc_K"],
    'oracle': ["m_index", "T_K", "re_closed_eV", "im_closed_eV", "re_sum_eV", "im_sum_eV", "rel_error"],
    'occupation': ["omega_eV", "T_K", "nB_A_fock", "nB_A_renormalized"],
}


class MagphonRunner:
    """Ejecuta los comandos del CLI sobre una RunConfig validada"""

    def __init__(self, cfg: RunConfig, report_dir: Path = Path("reports")):
        self.cfg = cfg
        self.params = cfg.params
        self.report_dir = Path(report_dir)
        self.omega = frequency_grid(cfg.omega_min, cfg.omega_max, cfg.omega_step)

        self.handlers: Dict[str, Callable[[], Optional[Path]]] = {
            'coupling': self.run_coupling,
            'spectrum': self.run_spectrum,
            'dos': self.run_dos,
            'magnetization': self.run_magnetization,
            'curie': self.run_curie,
            'oracle': self.run_oracle,
            'occupation': self.run_occupation,
            'selftest': self.run_selftest,
        }

    def output_path(self, command: str) -> Path:
        if self.cfg.output_path:
            return Path(self.cfg.output_path)
        return self.report_dir / f"{command}.csv"

    def run(self, command: str) -> Optional[Path]:
        if command not in self.handlers:
            raise ConfigError(f"comando desconocido {command!r}; opciones: {', '.join(COMMANDS)}")

        logger.info(f"▶️ Comando {command}: T={self.params.T} K, 𝒜={self.params.A_coupling} eV, "
                    f"{len(self.omega)} frecuencias, workers={self.cfg.workers}")
        path = self.handlers[command]()
        logger.info(f"✅ Comando {command} completado")
        return path

    def _write(self, command: str, rows) -> Path:
        return write_csv(rows, HEADERS[command], self.output_path(command))

    # =====================================
    # 🔗 ACOPLAMIENTO Y ESPECTROS
    # =====================================

    def run_coupling(self) -> Path:
        delta = coupling_on_grid(self.params, self.omega, nodes=self.cfg.quadrature_nodes, workers=self.cfg.workers)
        rows = np.column_stack([self.omega, delta.values.real, delta.values.imag])
        return self._write('coupling', rows)

    def run_spectrum(self) -> Path:
        cfg = self.cfg
        delta_total, _ = shifted_coupling(self.params, self.omega, nodes=cfg.quadrature_nodes, workers=cfg.workers)

        grid = build_spectral_grid(self.params, self.omega, delta_total, k_nodes=cfg.k_nodes, workers=cfg.workers)
        worst = float(np.max(np.abs(grid.sum_rule() - 1.0)))
        logger.info(f"📏 Regla de suma: máximo |∫A − 1| = {worst:.2e} en {cfg.k_nodes} nodos k")

        k = uniform_k_grid(self.params, cfg.k_output_points)
        values = spectral_map(self.params, k, self.omega, delta_total, workers=cfg.workers)

        n_k, n_omega = values.shape
        k_column = np.repeat(k / sphere_radius(self.params), n_omega)
        omega_column = np.tile(self.omega, n_k)
        flat = values.ravel()
        rows = np.column_stack([k_column, omega_column, flat, np.abs(flat)])
        return self._write('spectrum', rows)

    def run_dos(self) -> Path:
        a_total, shift = spectrum_at_temperature(self.params, self.omega, nodes=self.cfg.quadrature_nodes,
                                                 workers=self.cfg.workers)
        logger.info(f"🎯 𝒰′_𝒟 = {shift.U_prime_D:.6e} eV")
        rows = np.column_stack([self.omega, a_total, np.abs(a_total)])
        return self._write('dos', rows)

    # =====================================
    # 🌡️ TERMODINÁMICA
    # =====================================

    def run_magnetization(self) -> Path:
        cfg = self.cfg
        curve = magnetization_curve(self.params, cfg.T_list, self.omega, omega_cut=cfg.omega_cut,
                                    nodes=cfg.quadrature_nodes, workers=cfg.workers)
        if not curve.is_monotone_until_zero():
            logger.warning("⚠️ m(T) no es monótona antes del primer cruce por cero")

        rows = [(s.T, s.m, s.n_B_A_integral, s.U_prime_D) for s in curve.samples]
        return self._write('magnetization', rows)

    def run_curie(self) -> Path:
        cfg = self.cfg
        table = curie_sweep(self.params, cfg.A_list, self.omega, omega_cut=cfg.omega_cut,
                            nodes=cfg.quadrature_nodes, workers=cfg.workers, bracket=(cfg.tc_low, cfg.tc_high))

        path = self._write('curie', table)
        if len(table) >= 3:
            temperatures = [tc for _, tc in table]
            if not interior_minimum(temperatures):
                listing = ", ".join(f"{A:g} eV → {tc:.1f} K" for A, tc in table)
                raise TrendError(f"T_c(𝒜) sin mínimo interior ({listing}); tabla escrita en {path}")
            logger.info("🔥 T_c(𝒜) con mínimo interior")
        return path

    def run_occupation(self) -> Path:
        cfg = self.cfg
        fock = fock_total_spectral_function(self.params, self.omega, nodes=cfg.quadrature_nodes, workers=cfg.workers)

        rows: List[np.ndarray] = []
        for T in cfg.occupation_T_list:
            params = self.params.with_temperature(T)
            renormalized, _ = spectrum_at_temperature(params, self.omega, nodes=cfg.quadrature_nodes,
                                                      workers=cfg.workers)
            rows.append(np.column_stack([
                self.omega,
                np.full(self.omega.shape, float(T)),
                occupied_spectrum(self.omega, T, fock, cfg.omega_cut),
                occupied_spectrum(self.omega, T, renormalized, cfg.omega_cut),
            ]))
        return self._write('occupation', np.vstack(rows))

    # =====================================
    # 🧪 ORÁCULOS Y SELFTEST
    # =====================================

    def run_oracle(self) -> Path:
        cfg = self.cfg
        params = self.params.with_temperature(cfg.oracle_T)

        rows = []
        for m in cfg.matsubara_indices:
            closed = coupling_matsubara(m, params, nodes=cfg.quadrature_nodes)
            brute = matsubara_sum_oracle(m, params, n_trunc=cfg.oracle_terms, nodes=cfg.quadrature_nodes)
            error = abs(closed - brute) / abs(brute) if brute != 0 else abs(closed)
            logger.info(f"🧮 m={m}: forma cerrada {closed:.6e} vs suma {brute:.6e} (error {error:.1e})")
            rows.append((m, cfg.oracle_T, closed.real, closed.imag, brute.real, brute.imag, error))

        path = self._write('oracle', rows)
        worst = max(row[-1] for row in rows)
        if worst >= ORACLE_RTOL:
            raise SelfTestError(f"oráculo de Matsubara: error relativo {worst:.2e} >= {ORACLE_RTOL}")
        return path

    def run_selftest(self) -> None:
        validator = MagphonValidator(self.cfg, report_dir=self.report_dir)
        report = validator.run_full_validation()
        if validator.failed:
            names = ", ".join(r.name for r in validator.failed)
            raise SelfTestError(f"{report['failed_tests']} verificaciones fallidas: {names}")
        return None


def run_command(command: str, cfg: RunConfig, out: Optional[str] = None) -> Optional[Path]:
    """Ejecuta `command` con la configuración dada; `out` reemplaza output_path"""
    if out:
        cfg = replace(cfg, output_path=str(out))
    return MagphonRunner(cfg).run(command)
