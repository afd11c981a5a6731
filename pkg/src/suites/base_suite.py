"""
Clase base abstracta para todas las suites de verificación
Define el ciclo de ejecución común y la construcción de CheckResult
"""

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional, Tuple

from src.config import LOG_FILE, LOG_LEVEL, LOG_MESSAGES, TF_THREADS
from src.exceptions import SpecFileError, TetradJetError
from src.models import CheckResult, SuiteResult
from src.utils import setup_logger


Measurement = Tuple[float, Dict[str, Any]]


class BaseSuite(ABC):
    """
    Clase abstracta base para suites
    Cada suite concreta implementa execute() y registra sus verificaciones
    con measure()
    """

    name = "base"

    def __init__(self, target: str, threads: int = TF_THREADS):
        """
        Args:
            target: descripción de lo verificado (ruta del spec o nombre del chequeo)
            threads: tope del pool de evaluación
        """
        self.target = target
        self.threads = threads
        self.logger = setup_logger(f"suite.{self.name}", LOG_FILE, getattr(logging, LOG_LEVEL, logging.INFO))
        self.result: Optional[SuiteResult] = None

    def run(self) -> SuiteResult:
        """
        Orquesta la suite: prepara el resultado, ejecuta y resume

        Los errores de la librería se convierten en un mensaje de error de la
        suite; SpecFileError y cualquier otra excepción se propagan.
        """
        start_time = time.time()
        self.logger.info(LOG_MESSAGES["suite_start"].format(suite=self.name, target=self.target))
        self.result = SuiteResult(suite=self.name, target=self.target)

        try:
            self.execute(self.result)
        except SpecFileError:
            raise
        except TetradJetError as e:
            self.result.error_message = f"{type(e).__name__}: {e}"
            self.logger.error(LOG_MESSAGES["suite_error"].format(suite=self.name, error=self.result.error_message))

        self.result.execution_time_seconds = time.time() - start_time
        passed = sum(1 for c in self.result.checks if c.passed)
        if self.result.success:
            self.logger.info(LOG_MESSAGES["suite_success"].format(
                suite=self.name, passed=passed, total=len(self.result.checks)
            ))
        else:
            self.logger.warning(f"⚠️ Suite {self.name}: {passed}/{len(self.result.checks)} verificaciones pasan")
        return self.result

    @abstractmethod
    def execute(self, result: SuiteResult) -> None:
        """Ejecuta las verificaciones y las agrega a result.checks"""

    def measure(
        self,
        name: str,
        fn: Callable[[], Measurement],
        tolerance: float,
        expected_fail: bool = False,
    ) -> CheckResult:
        """
        Ejecuta fn() → (desviación, detalles) y la compara con la tolerancia

        expected_fail invierte el veredicto: fallar da 'expected-fail' y pasar
        se reporta como 'fail' con unexpected_pass en los detalles.
        """
        start = time.time()
        try:
            deviation, details = fn()
            status = "pass" if deviation <= tolerance else "fail"
        except TetradJetError as e:
            deviation, details = float("inf"), {"error": f"{type(e).__name__}: {e}"}
            status = "error"
            self.logger.error(f"❌ {name}: {details['error']}")

        if expected_fail:
            if status == "fail":
                status = "expected-fail"
                self.logger.info(LOG_MESSAGES["check_expected_fail"].format(check=name))
            elif status == "pass":
                status = "fail"
                details = {**details, "unexpected_pass": True}
                self.logger.warning(f"⚠️ {name}: pasó pero [expect] declara falla")
        elif status == "fail":
            self.logger.warning(LOG_MESSAGES["check_failed"].format(
                check=name, deviation=deviation, tolerance=tolerance
            ))

        check = CheckResult(
            name=name,
            status=status,
            max_deviation=float(deviation),
            tolerance=float(tolerance),
            details=details,
            timing_seconds=time.time() - start,
        )
        if self.result is not None:
            self.result.checks.append(check)
        return check
