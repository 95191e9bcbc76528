# magphon.py
"""
MAGPHON v1.0 - LANZADOR PRINCIPAL
Acoplamiento magnón-fonón, espectros renormalizados y temperatura de Curie desde la línea de comandos
"""

import sys
import argparse
from pathlib import Path

# Agregar directorio actual al path de Python
sys.path.append(str(Path(__file__).parent))

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from loguru import logger

from src import get_version
from src.cli_io import apply_overrides, dump_config, load_config, setup_logging
from src.commands import COMMANDS, run_command
from src.errors import MagphonError

# stdout queda libre para --dump-config
console = Console(stderr=True)


class MagphonArgumentParser(argparse.ArgumentParser):
    """Los errores de uso salen con código 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def create_argument_parser():
    """Crear parser de argumentos"""
    parser = MagphonArgumentParser(
        prog="magphon",
        description=f"Magphon v{get_version()} - acoplamiento magnón-fonón en un modelo isotrópico 3D",
        epilog="Ejemplo: python magphon.py dos --set A_coupling=0.064 --set T=300",
    )

    parser.add_argument("command", choices=COMMANDS, help="Comando a ejecutar")
    parser.add_argument("--config", help="Archivo clave = valor (default: valores del modelo)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="CLAVE=VALOR",
        help="Sobreescribe una clave de la configuración (repetible)",
    )
    parser.add_argument("--out", help="Ruta del CSV de salida (default: reports/<comando>.csv)")
    parser.add_argument("--dump-config", action="store_true", help="Imprime la configuración efectiva y termina")
    parser.add_argument("--verbose", "-v", action="store_true", help="Output detallado")
    parser.add_argument("--version", action="version", version=f"magphon {get_version()}")

    return parser


def display_banner(command: str, cfg):
    """Mostrar banner inicial"""
    banner_text = f"""
[bold blue]🧲 MAGPHON v{get_version()}[/bold blue]
[dim]Acoplamiento magnón-fonón[/dim]

[green]✅ Comando:[/green] {command}
[green]✅ 𝒜:[/green] {cfg.A_coupling} eV   [green]T:[/green] {cfg.T} K   [green]η:[/green] {cfg.eta} eV
[green]✅ Malla:[/green] [{cfg.omega_min}, {cfg.omega_max}] eV, paso {cfg.omega_step} eV
[green]✅ Workers:[/green] {cfg.workers}
    """
    console.print(Panel(banner_text, title="🚀 Sistema Iniciado", border_style="blue"))


def main(argv=None):
    """Función principal"""
    parser = create_argument_parser()
    args = parser.parse_args(argv)

    try:
        setup_logging(verbose=args.verbose)

        cfg = apply_overrides(load_config(args.config), args.overrides)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0

        display_banner(args.command, cfg)
        path = run_command(args.command, cfg, out=args.out)
        if path is not None:
            console.print(f"💾 [green]Resultados en {path}[/green]")

    except MagphonError as e:
        console.print(f"❌ [red]{type(e).__name__}: {escape(str(e))}[/red]")
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code

    except KeyboardInterrupt:
        console.print("\n⏹️ [yellow]Proceso interrumpido por el usuario[/yellow]")
        logger.info("⏹️ Proceso interrumpido por usuario")
        return 1

    except Exception as e:
        console.print(f"\n💥 [red]Error fatal: {escape(str(e))}[/red]")
        logger.exception(f"💥 Error fatal: {e}")
        return 1

    return 0


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
