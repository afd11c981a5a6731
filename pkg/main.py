#!/usr/bin/env python3
"""
tetradjet: formulación de primer orden de la Relatividad General con tétradas
Punto de entrada principal del sistema

Uso:
    python main.py verify specs/schwarzschild.spec --grid 5,5,5,5 --json out.jsonl
    python main.py fuzz prop32 --trials 1000 --seed 7
    python main.py solve specs/schwarzschild_family.spec --max-iter 50
    python main.py noether specs/schwarzschild.spec --translate t
"""

import sys
import argparse
import logging
from typing import Optional

from src.analyzer import ResidualAnalyzer
from src.config import (
    DEFAULT_GRID_POINTS, FUZZ_SEED, FUZZ_TRIALS, LOG_FILE, LOG_LEVEL,
    SOLVER_COLLOCATION, SOLVER_MAX_ITER, TF_THREADS,
)
from src.exceptions import SpecFileError, TetradJetError
from src.models import SuiteResult
from src.report_generator import ReportGenerator
from src.specfile import dump_normalized, load_spec
from src.suites import FUZZ_CHECKS, FuzzSuite, NoetherSuite, SolveSuite, VerifySuite
from src.suites.noether_suite import translation_fields
from src.utils import parse_grid_flag, setup_logger


# Configurar logger principal
logger = setup_logger('main', LOG_FILE, getattr(logging, LOG_LEVEL))


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SPEC_ERROR = 2


def log_summary(result: SuiteResult) -> None:
    """
    Imprime el resumen de verificaciones de una suite
    """
    logger.info("\n" + "=" * 80)
    logger.info(f"📊 RESUMEN: {result.suite} sobre {result.target}")
    logger.info("=" * 80)

    for check in result.checks:
        status = "✅" if check.passed else "❌"
        logger.info(
            f"  {status} {check.name:<28} {check.status:<14} "
            f"desviación {check.max_deviation:.3e}  (tol {check.tolerance:.1e})"
        )

    if result.error_message:
        logger.error(f"❌ {result.error_message}")

    passed = sum(1 for c in result.checks if c.passed)
    logger.info(f"📈 Total: {passed}/{len(result.checks)} verificaciones")
    logger.info("=" * 80)


def emit(result: SuiteResult, json_path: Optional[str], include_timing: bool) -> int:
    """
    Registra el resumen, escribe el reporte JSON si se pidió y calcula el código de salida
    """
    log_summary(result)
    if json_path:
        ReportGenerator(include_timing=include_timing).write(result, json_path)
    return EXIT_OK if result.success else EXIT_FAILED


def cmd_verify(args) -> int:
    """
    Validaciones cruzadas sobre la malla del dominio del spec
    """
    spec = load_spec(args.spec)

    if args.dump_normalized:
        sys.stdout.write(dump_normalized(spec))
        return EXIT_OK

    counts = parse_grid_flag(args.grid, DEFAULT_GRID_POINTS)
    suite = VerifySuite(spec, counts=counts, threads=args.threads)
    result = suite.run()

    if args.csv and suite.report is not None:
        ResidualAnalyzer(suite.report, spec.coords).export_csv(args.csv)

    return emit(result, args.json, not args.no_timing)


def cmd_fuzz(args) -> int:
    """
    Ensayos sembrados de un chequeo de covarianza o del parser
    """
    suite = FuzzSuite(args.check, trials=args.trials, seed=args.seed, mutate=args.mutate, threads=args.threads)
    return emit(suite.run(), args.json, not args.no_timing)


def cmd_solve(args) -> int:
    """
    Ajuste de las incógnitas de una familia de tétradas
    """
    spec = load_spec(args.spec)
    collocation = parse_grid_flag(args.collocation, DEFAULT_GRID_POINTS)
    suite = SolveSuite(spec, collocation=collocation, max_iter=args.max_iter, threads=args.threads)
    return emit(suite.run(), args.json, not args.no_timing)


def cmd_noether(args) -> int:
    """
    Corrientes de Noether de los campos pedidos sobre una sección crítica
    """
    spec = load_spec(args.spec)
    fields = translation_fields(spec, args.translate)
    if args.vectorfield:
        field = spec.vector_field()
        if field is None:
            raise SpecFileError(f"{spec.name}: --vectorfield requiere una sección [vectorfield]")
        fields.append(field)

    counts = parse_grid_flag(args.grid, 0) if args.grid else (2, 5, 5, 2)
    suite = NoetherSuite(spec, fields, counts=counts, defect=args.defect, threads=args.threads)
    return emit(suite.run(), args.json, not args.no_timing)


COMMANDS = {
    'verify': cmd_verify,
    'fuzz': cmd_fuzz,
    'solve': cmd_solve,
    'noether': cmd_noether,
}


def build_parser() -> argparse.ArgumentParser:
    """Construye el parser de argumentos con un subcomando por suite"""
    parser = argparse.ArgumentParser(
        description='tetradjet: Relatividad General de primer orden con tétradas sobre J(E)',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos de uso:
  python main.py verify specs/minkowski.spec                 # Todas las verificaciones
  python main.py verify specs/schwarzschild.spec --json r.jsonl --no-timing
  python main.py verify specs/frw_dust.spec --csv residuos.csv
  python main.py verify specs/rindler.spec --dump-normalized  # Eco canónico del spec
  python main.py fuzz prop31 --trials 200 --seed 7           # Ensayos sembrados
  python main.py fuzz prop32 --trials 50 --mutate            # Debe fallar
  python main.py solve specs/schwarzschild_family.spec       # Ajusta (c0, c1)
  python main.py noether specs/schwarzschild.spec --translate t --defect

Códigos de salida:
  0  todas las verificaciones pasan
  1  verificaciones fallidas, sin convergencia o sección no crítica
  2  error de lectura del spec

Variables de entorno:
  TF_THREADS  tope del pool de evaluación sobre la malla
        """
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', type=str, help='Ruta del reporte JSON por líneas')
    common.add_argument('--no-timing', action='store_true', help='Omitir tiempos (reporte determinista)')
    common.add_argument('--threads', type=int, default=TF_THREADS, help='Tope del pool de evaluación')

    subparsers = parser.add_subparsers(dest='command', help='Comandos disponibles')

    # Comando: verify
    verify_parser = subparsers.add_parser('verify', parents=[common], help='Verificar un spec sobre una malla')
    verify_parser.add_argument('spec', type=str, help='Archivo .spec')
    verify_parser.add_argument('--grid', type=str, help='Puntos por eje: n o n,n,n,n')
    verify_parser.add_argument('--csv', type=str, help='Exportar tabla de residuos a CSV')
    verify_parser.add_argument('--dump-normalized', action='store_true', help='Imprimir el spec normalizado y salir')

    # Comando: fuzz
    fuzz_parser = subparsers.add_parser('fuzz', parents=[common], help='Ensayos sembrados de identidades')
    fuzz_parser.add_argument('check', choices=sorted(FUZZ_CHECKS), help='Chequeo a ensayar')
    fuzz_parser.add_argument('--trials', type=int, default=FUZZ_TRIALS, help='Número de ensayos')
    fuzz_parser.add_argument('--seed', type=int, default=FUZZ_SEED, help='Semilla')
    fuzz_parser.add_argument('--mutate', action='store_true', help='Romper el chequeo a propósito')

    # Comando: solve
    solve_parser = subparsers.add_parser('solve', parents=[common], help='Ajustar una familia con incógnitas')
    solve_parser.add_argument('spec', type=str, help='Archivo .spec con [unknowns]')
    solve_parser.add_argument('--max-iter', type=int, default=SOLVER_MAX_ITER, help='Iteraciones máximas')
    solve_parser.add_argument('--collocation', type=str, default=SOLVER_COLLOCATION, help='Puntos de colocación por eje')

    # Comando: noether
    noether_parser = subparsers.add_parser('noether', parents=[common], help='Corrientes de Noether')
    noether_parser.add_argument('spec', type=str, help='Archivo .spec de una sección crítica')
    noether_parser.add_argument('--translate', action='append', default=[], help='Coordenada a trasladar (repetible)')
    noether_parser.add_argument('--vectorfield', action='store_true', help='Usar la sección [vectorfield] del spec')
    noether_parser.add_argument('--defect', action='store_true', help='Medir el exponente del defecto de simetría')
    noether_parser.add_argument('--grid', type=str, help='Puntos por eje: n o n,n,n,n')

    return parser


def main(argv=None) -> int:
    """Función principal con CLI"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    # Ejecutar comando
    try:
        return COMMANDS[args.command](args)

    except KeyboardInterrupt:
        logger.info("\n⚠️ Proceso interrumpido por el usuario")
        return EXIT_FAILED

    except SpecFileError as e:
        logger.error(f"❌ Error en el spec: {e}")
        return EXIT_SPEC_ERROR

    except ValueError as e:
        logger.error(f"❌ Argumento inválido: {e}")
        return EXIT_SPEC_ERROR

    except TetradJetError as e:
        logger.error(f"\n❌ Error fatal: {type(e).__name__}: {e}")
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
