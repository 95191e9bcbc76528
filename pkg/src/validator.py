# src/validator.py
"""
SISTEMA DE VALIDACIÓN MAGPHON
Verificación automática de invariantes y oráculos de todos los módulos numéricos
"""

import json
import tempfile
import time
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np
from loguru import logger
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table
from scipy.integrate import trapezoid

from . import coupling, model, spectra, spin_algebra, thermo
from .cli_io import RunConfig, dump_config, parse_config, write_csv
from .errors import OutputError
from .oracles import coupling_quad

console = Console()

Check = Tuple[bool, str]

GOLDSTONE_COUPLINGS = (0.0, 0.032, 0.064)
CUT_SENSITIVITY_COUPLING = 0.064


class TestResult:
    """Resultado de una verificación"""

    __test__ = False

    def __init__(self, name: str, passed: bool, message: str = "", duration: float = 0.0, category: str = "other"):
        self.name = name
        self.passed = passed
        self.message = message
        self.duration = duration
        self.category = category
        self.timestamp = datetime.now().isoformat()


class MagphonValidator:
    """Suite de invariantes del selftest"""

    def __init__(self, cfg: RunConfig, report_dir: Path = Path("reports")):
        self.cfg = cfg
        self.report_dir = Path(report_dir)
        self.results: List[TestResult] = []

        self.test_categories = {
            'spin_algebra': 'Álgebra de Espín',
            'model': 'Modelo',
            'coupling': 'Acoplamiento',
            'spectra': 'Espectros',
            'thermo': 'Termodinámica',
            'output': 'Configuración y Salida',
        }

    # =====================================
    # 🧪 EJECUCIÓN
    # =====================================

    def run_check(self, category: str, name: str, check: Callable[[], Check]) -> TestResult:
        """Ejecuta una verificación; cualquier excepción cuenta como fallo"""
        start = time.perf_counter()
        try:
            passed, message = check()
        except Exception as e:
            passed, message = False, f"{type(e).__name__}: {e}"
            logger.error(f"❌ {name}: {message}")

        result = TestResult(name, bool(passed), message, time.perf_counter() - start, category)
        self.results.append(result)
        logger.debug(f"{'✅' if result.passed else '❌'} {name}: {message}")
        return result

    def run_full_validation(self) -> Dict:
        """Ejecuta todas las verificaciones, muestra el resumen y guarda el reporte JSON"""
        console.print("🧪 [bold blue]VALIDACIÓN COMPLETA DE MAGPHON[/bold blue]")

        groups = [
            ("🧮 Álgebra de espín...", self.test_spin_algebra),
            ("🌐 Modelo...", self.test_model),
            ("🔗 Acoplamiento...", self.test_coupling),
            ("📊 Espectros...", self.test_spectra),
            ("🌡️ Termodinámica...", self.test_thermo),
            ("💾 Configuración y salida...", self.test_output),
        ]

        start_time = datetime.now()
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            TimeElapsedColumn(),
            console=console,
        ) as progress:
            task = progress.add_task("Ejecutando validaciones...", total=len(groups))
            for description, group in groups:
                progress.update(task, description=description)
                group()
                progress.advance(task)

        duration = (datetime.now() - start_time).total_seconds()
        report = self.generate_validation_report(duration)
        self.display_validation_results()
        return report

    @property
    def failed(self) -> List[TestResult]:
        return [r for r in self.results if not r.passed]

    # =====================================
    # 🧮 ÁLGEBRA DE ESPÍN
    # =====================================

    def test_spin_algebra(self):
        couplings = (-3.0, 0.0, 0.5, 1.0, 2.0, 7.25)

        def crossing() -> Check:
            ok = all(spin_algebra.check_crossing(spin_algebra.build_bare_interaction(U)) for U in couplings)
            return ok, f"simetría de cruce en {len(couplings)} valores de U"

        def same_spin() -> Check:
            ok = all(
                spin_algebra.build_bare_interaction(U)[s, s, s, s] == 0
                for U in couplings for s in ('up', 'down')
            )
            return ok, "entradas σσσσ nulas"

        def round_trip() -> Check:
            worst = 0.0
            for U in couplings:
                t = spin_algebra.build_bare_interaction(U)
                back = spin_algebra.pauli_reconstruct(spin_algebra.pauli_decompose(t))
                worst = max(worst, float(np.max(np.abs(back.entries - t.entries))))
            return worst <= 1e-12, f"residuo máximo {worst:.1e}"

        def coefficients() -> Check:
            c = spin_algebra.pauli_decompose(spin_algebra.build_bare_interaction(1.0))
            expected = np.diag([0.25, -0.25, -0.25, -0.25])
            error = float(np.max(np.abs(c.v - expected)))
            return error <= 1e-12, f"diag(1/4, −1/4, −1/4, −1/4) con error {error:.1e}"

        self.run_check('spin_algebra', 'crossing_symmetry', crossing)
        self.run_check('spin_algebra', 'same_spin_zero', same_spin)
        self.run_check('spin_algebra', 'pauli_round_trip', round_trip)
        self.run_check('spin_algebra', 'pauli_coefficients', coefficients)

    # =====================================
    # 🌐 MODELO
    # =====================================

    def test_model(self):
        params = self.cfg.params

        def measure() -> Check:
            _, w = model.radial_nodes(params, self.cfg.quadrature_nodes)
            error = abs(float(np.sum(w)) - 1.0)
            return error <= 1e-12, f"Σ w_j − 1 = {error:.1e}"

        def dispersion() -> Check:
            K = model.sphere_radius(params)
            q = np.linspace(0.0, K, 1001)
            energy = model.magnon_energy(q, params)
            ok = energy[0] == 0 and np.all(np.diff(energy) >= 0) and energy[-1] <= params.W_magnon * (1 + 1e-15)
            return bool(ok), f"ω^M monótona en [0, K], máximo {energy[-1]:.6g} eV"

        def bose() -> Check:
            value = model.bose_occupation(0.05, 300.0)
            return abs(value - 0.1690) < 5e-4, f"n_B(0.05 eV, 300 K) = {value:.6f}"

        def gbar() -> Check:
            band = model.ElectronBand(((-0.5, 0.5), (1.0, 0.5)))
            value = model.gbar(band, 300.0)
            return abs(value - 0.25) < 1e-8, f"Ḡ = {value:.12f} 1/eV"

        self.run_check('model', 'radial_measure', measure)
        self.run_check('model', 'magnon_dispersion', dispersion)
        self.run_check('model', 'bose_occupation', bose)
        self.run_check('model', 'gbar_levels', gbar)

    # =====================================
    # 🔗 ACOPLAMIENTO
    # =====================================

    def _omega(self) -> np.ndarray:
        return coupling.frequency_grid(self.cfg.omega_min, self.cfg.omega_max, self.cfg.omega_step)

    def test_coupling(self):
        cfg = self.cfg
        nodes = cfg.quadrature_nodes
        params = cfg.params
        omega = self._omega()
        warm = params.with_temperature(cfg.oracle_T)

        def quad_oracle() -> Check:
            if params.A_coupling == 0:
                return True, "𝒜 = 0: Δ_MP idénticamente nulo"
            worst = 0.0
            for p in (params, warm):
                for w in coupling.resonant_frequencies(p):
                    value = coupling.coupling_retarded(float(w), p, nodes=nodes)
                    reference = coupling_quad(float(w), p)
                    worst = max(worst, abs(value - reference) / abs(reference))
            return worst < 1e-4, f"error máximo vs quad {worst:.1e} (ω = 0 y ventanas resonantes)"

        def doubling() -> Check:
            worst = 0.0
            checked = 0
            for p in (params, warm):
                for w in coupling.resonant_frequencies(p):
                    worst = max(worst, coupling.check_quadrature_convergence(float(w), p, nodes=nodes))
                    checked += 1
            return True, f"cambio relativo máximo {worst:.1e} al duplicar nodos ({checked} frecuencias)"

        def sign() -> Check:
            worst = []
            cold = coupling.coupling_retarded(omega, params.with_temperature(0.0), nodes=nodes, workers=cfg.workers)
            worst.append(float(np.max(cold.imag)))
            hot = coupling.coupling_retarded(omega, warm, nodes=nodes, workers=cfg.workers)
            emission = omega >= 5 * params.eta
            absorption = (omega >= -params.omega_P) & (omega <= -5 * params.eta)
            ok = worst[0] <= 1e-12 and np.max(hot.imag[emission]) <= 1e-12 and np.min(hot.imag[absorption]) >= -1e-12
            return bool(ok), f"max Im Δ (T=0) = {worst[0]:.1e}"

        def scaling() -> Check:
            base = params.with_coupling(0.032)
            single = coupling.coupling_retarded(omega[::50], base, nodes=nodes)
            double = coupling.coupling_retarded(omega[::50], base.with_coupling(0.064), nodes=nodes)
            error = float(np.max(np.abs(double - 4.0 * single)) / np.max(np.abs(single)))
            return error <= 1e-12, f"Δ(2𝒜)/Δ(𝒜) − 4: {error:.1e}"

        def kramers_kronig() -> Check:
            delta = coupling.coupling_retarded(omega, params.with_coupling(max(params.A_coupling, 0.032)),
                                               nodes=nodes, workers=cfg.workers)
            rebuilt = coupling.kramers_kronig_real(omega, delta.imag)
            n = len(omega)
            interior = slice(n // 10, n - n // 10)
            error = float(np.max(np.abs(rebuilt[interior] - delta.real[interior])) / np.max(np.abs(delta)))
            return error <= 0.02, f"desvío KK {100 * error:.2f}% de max|Δ|"

        def matsubara() -> Check:
            oracle_params = warm.with_coupling(max(params.A_coupling, 0.032))
            index = cfg.matsubara_indices[0]
            closed = coupling.coupling_matsubara(index, oracle_params, nodes=nodes)
            brute = coupling.matsubara_sum_oracle(index, oracle_params, n_trunc=cfg.oracle_terms, nodes=nodes)
            error = abs(closed - brute) / abs(brute)
            return error < 1e-3, f"m={index}: error relativo {error:.1e}"

        self.run_check('coupling', 'quad_oracle', quad_oracle)
        self.run_check('coupling', 'quadrature_doubling', doubling)
        self.run_check('coupling', 'imaginary_sign', sign)
        self.run_check('coupling', 'coupling_scaling', scaling)
        self.run_check('coupling', 'kramers_kronig', kramers_kronig)
        self.run_check('coupling', 'matsubara_oracle', matsubara)

    # =====================================
    # 📊 ESPECTROS
    # =====================================

    def test_spectra(self):
        cfg = self.cfg
        params = cfg.params
        omega = self._omega()
        delta_total, _ = coupling.shifted_coupling(params, omega, nodes=cfg.quadrature_nodes, workers=cfg.workers)

        def dyson() -> Check:
            k = model.sphere_radius(params) * np.array([0.0, 0.3, 0.7, 1.0])
            r = spectra.fock_magnon_retarded(k[:, None], omega[None, :], params)
            R = spectra.renormalized_magnon_retarded(k[:, None], omega[None, :], delta_total, params)
            difference = 1.0 / r - 1.0 / R
            expected = np.broadcast_to(delta_total.values, difference.shape)
            scale = np.maximum(np.abs(expected), np.max(np.abs(expected)) * 1e-6 + 1e-300)
            error = float(np.max(np.abs(difference - expected) / scale))
            return error <= 1e-10, f"1/r − 1/ℛ vs Δ_total: {error:.1e}"

        def fock_identity() -> Check:
            bare = params.with_coupling(0.0)
            zero_delta, _ = coupling.shifted_coupling(bare, omega, nodes=cfg.quadrature_nodes)
            k = model.sphere_radius(params) * 0.4
            same = np.array_equal(spectra.renormalized_magnon_retarded(k, omega, zero_delta, bare),
                                  spectra.fock_magnon_retarded(k, omega, bare))
            return same, "ℛ = r con 𝒜 = 0"

        def sum_rules() -> Check:
            grid = spectra.build_spectral_grid(params, omega, delta_total, k_nodes=cfg.k_nodes, workers=cfg.workers)
            per_k = grid.sum_rule()
            total = trapezoid(grid.total(), dx=grid.omega_step)
            worst = float(max(np.max(np.abs(per_k - 1.0)), abs(total - 1.0)))
            return worst <= 0.02, f"máximo |∫A − 1| = {worst:.2e}"

        def goldstone() -> Check:
            worst = 0.0
            for A in GOLDSTONE_COUPLINGS:
                for T in (0.0, cfg.oracle_T):
                    p = params.with_coupling(A).with_temperature(T)
                    shifted, _ = coupling.shifted_coupling(p, omega, nodes=cfg.quadrature_nodes, workers=cfg.workers)
                    worst = max(worst, abs(spectra.goldstone_peak(omega, shifted, p)))
            return worst <= params.eta, f"pico en k=0 a lo sumo a {worst:.2e} eV de ω = 0"

        self.run_check('spectra', 'dyson_consistency', dyson)
        self.run_check('spectra', 'fock_identity', fock_identity)
        self.run_check('spectra', 'sum_rules', sum_rules)
        self.run_check('spectra', 'goldstone_peak', goldstone)

    # =====================================
    # 🌡️ TERMODINÁMICA
    # =====================================

    def test_thermo(self):
        cfg = self.cfg
        params = cfg.params
        omega = self._omega()

        def ground_state() -> Check:
            m = thermo.magnetization(params.with_temperature(0.0), omega, omega_cut=cfg.omega_cut,
                                     nodes=cfg.quadrature_nodes)
            return m == 0.5, f"m(0) = {m}"

        def cut_sensitivity() -> Check:
            warm = params.with_temperature(cfg.oracle_T).with_coupling(CUT_SENSITIVITY_COUPLING)
            full = thermo.magnetization(warm, omega, omega_cut=cfg.omega_cut, nodes=cfg.quadrature_nodes,
                                        workers=cfg.workers)
            half = thermo.magnetization(warm, omega, omega_cut=0.5 * cfg.omega_cut, nodes=cfg.quadrature_nodes,
                                        workers=cfg.workers)
            change = abs(half - full) / abs(full)
            return change < 0.02, f"m({cfg.oracle_T} K, 𝒜 = 64 meV) cambia {100 * change:.2f}% con ω_cut/2"

        self.run_check('thermo', 'ground_state_magnetization', ground_state)
        self.run_check('thermo', 'omega_cut_sensitivity', cut_sensitivity)

    # =====================================
    # 💾 CONFIGURACIÓN Y SALIDA
    # =====================================

    def test_output(self):
        def config_round_trip() -> Check:
            return parse_config(dump_config(self.cfg)) == self.cfg, "parse(dump(cfg)) = cfg"

        def csv_contract() -> Check:
            with tempfile.TemporaryDirectory() as tmp:
                path = write_csv([(0.0, 0.5)], ["T_K", "m"], Path(tmp) / "contract.csv")
                content = path.read_bytes()
            expected = b"T_K,m\n0.000000000e0,5.000000000e-1\n"
            return content == expected, repr(content)

        self.run_check('output', 'config_round_trip', config_round_trip)
        self.run_check('output', 'csv_format', csv_contract)

    # =====================================
    # 📋 REPORTES
    # =====================================

    def display_validation_results(self):
        """Panel de resumen y tabla detallada"""
        total_tests = len(self.results)
        passed_tests = total_tests - len(self.failed)
        failed_tests = len(self.failed)

        summary_text = f"""
[bold green]✅ Pruebas Exitosas: {passed_tests}[/bold green]
[bold red]❌ Pruebas Fallidas: {failed_tests}[/bold red]
[bold white]📋 Total Pruebas: {total_tests}[/bold white]
        """
        if failed_tests == 0:
            border_style, status = "green", "🎉 INVARIANTES VERIFICADOS"
        else:
            border_style, status = "red", "❌ HAY INVARIANTES VIOLADOS"
        console.print(Panel(summary_text, title=status, border_style=border_style))

        results_table = Table(title="📋 Resultados Detallados de Validación")
        results_table.add_column("Prueba", style="cyan")
        results_table.add_column("Estado", style="green")
        results_table.add_column("Mensaje", style="white")
        results_table.add_column("Categoría", style="yellow")
        results_table.add_column("s", justify="right")

        for result in self.results:
            results_table.add_row(
                result.name.replace('_', ' ').title(),
                "✅" if result.passed else "❌",
                result.message[:60] + "..." if len(result.message) > 60 else result.message,
                self.test_categories.get(result.category, result.category.title()),
                f"{result.duration:.2f}",
            )
        console.print(results_table)

    def generate_validation_report(self, duration: float) -> Dict:
        """Reporte JSON en reports/"""
        passed = len(self.results) - len(self.failed)
        report = {
            'timestamp': datetime.now().isoformat(),
            'duration_seconds': duration,
            'total_tests': len(self.results),
            'passed_tests': passed,
            'failed_tests': len(self.failed),
            'system_status': 'VALIDATED' if not self.failed else 'FAILED',
            'test_results': [
                {
                    'name': r.name,
                    'category': r.category,
                    'passed': r.passed,
                    'message': r.message,
                    'duration': r.duration,
                    'timestamp': r.timestamp,
                }
                for r in self.results
            ],
        }

        report_file = self.report_dir / f"selftest_report_{datetime.now():%Y%m%d_%H%M%S}.json"
        try:
            report_file.parent.mkdir(parents=True, exist_ok=True)
            with open(report_file, 'w', encoding='utf-8') as f:
                json.dump(report, f, indent=2, ensure_ascii=False)
        except OSError as e:
            raise OutputError(report_file, f"no se pudo guardar el reporte ({e})") from e

        logger.info(f"📊 Reporte de validación guardado: {report_file}")
        report['report_file'] = str(report_file)
        return report
