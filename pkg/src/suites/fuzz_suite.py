"""
Suite `fuzz`: ensayos sembrados de las identidades de covarianza y del parser

Cada ensayo k usa su propio generador default_rng([seed, k]); el resultado
no depende del tamaño del pool.
"""

from typing import Callable, Dict, List

import numpy as np

from src.config import FUZZ_SEED, FUZZ_TRIALS, TF_THREADS, TOLERANCES
from src.exceptions import DomainError
from src.exprdsl import differentiate, evaluate, parse, to_text
from src.geometry import christoffel, metric_from_tetrad, spin_from_christoffel, spin_from_tetrad, tetrad_at
from src.models import SuiteResult
from src.samples import (
    SCHWARZSCHILD_DOMAIN, UNIT_DOMAIN, nonholonomic_witness, random_coord_change, random_expr,
    random_lorentz_field, random_point, random_spin_data, random_tetrad, schwarzschild,
)
from src.sections import Section
from src.suites.base_suite import BaseSuite
from src.transforms import FramePoint, contact_pullback, contact_transform, frame_point, transform_section
from src.utils import parallel_map, relative_deviation
from src.variational import prop31_check, prop32_check


_FD_STEP = 1e-5


def _trial_prop31(rng: np.random.Generator, mutate: bool) -> Dict[str, float]:
    section = Section(schwarzschild())
    lorentz = random_lorentz_field(rng)
    change = random_coord_change(rng)
    x = random_point(rng, SCHWARZSCHILD_DOMAIN)
    sample = prop31_check(section, lorentz, change, change.forward_at(x), inhomogeneous=not mutate)
    return {"prop31": sample.deviation}


def _trial_prop32(rng: np.random.Generator, mutate: bool) -> Dict[str, float]:
    omega, domega, frame = random_spin_data(rng)
    sample = prop32_check(omega, domega, frame, trace_shift=0.5 if mutate else 0.0)
    return {"prop32": sample.deviation}


def _trial_two_route(rng: np.random.Generator, mutate: bool) -> Dict[str, float]:
    """Conexión por la fórmula Σ contra la de Christoffel sobre una tétrada aleatoria"""
    v = tetrad_at(random_tetrad(rng), random_point(rng, UNIT_DOMAIN))
    g = metric_from_tetrad(v)
    direct = spin_from_tetrad(v, g).omega
    via_christoffel = spin_from_christoffel(v, christoffel(g)).omega
    if mutate:
        via_christoffel = np.transpose(via_christoffel, (0, 2, 1))
    return {"two_route": float(np.max(np.abs(direct - via_christoffel)))}


def _trial_roundtrip(rng: np.random.Generator, mutate: bool) -> Dict[str, float]:
    """parse(to_text(e)) == e y derivada simbólica contra diferencia central"""
    expr = random_expr(rng)
    printed = to_text(expr)
    reparsed = parse(printed)
    mismatch = 0.0 if reparsed == expr and to_text(reparsed) == printed else 1.0

    x = rng.uniform(0.5, 1.5, 4)
    i = int(rng.integers(0, 4))
    target = (i + 1) % 4 if mutate else i
    try:
        exact = evaluate(differentiate(expr, target), x)
        plus, minus = x.copy(), x.copy()
        plus[i] += _FD_STEP
        minus[i] -= _FD_STEP
        approx = (evaluate(expr, plus) - evaluate(expr, minus)) / (2.0 * _FD_STEP)
    except DomainError:
        return {"roundtrip": mismatch, "derivative": 0.0}
    error = abs(exact - approx) / (1.0 + abs(exact))
    return {"roundtrip": mismatch, "derivative": error}


def _trial_contact(rng: np.random.Generator, mutate: bool) -> Dict[str, float]:
    """Contacto nulo en secciones holónomas y ley θ̄ = Λθ sobre un testigo no holónomo"""
    holonomic = Section(random_tetrad(rng))
    x = random_point(rng, UNIT_DOMAIN)
    zero = float(np.max(np.abs(contact_pullback(holonomic, x).C)))

    witness = nonholonomic_witness(float(rng.uniform(0.05, 0.5)))
    lorentz = random_lorentz_field(rng)
    change = random_coord_change(rng)
    point = frame_point(lorentz, change, change.forward_at(x))
    if mutate:
        point = FramePoint(point.x, point.xbar, np.eye(4), point.dlam, point.J, point.H)
    expected = contact_transform(contact_pullback(witness, point.x), point)
    transformed = contact_pullback(transform_section(witness, lorentz, change), point.xbar)
    return {"contact": zero, "contact_covariance": relative_deviation(transformed.C, expected.C)}


FUZZ_CHECKS: Dict[str, Callable[[np.random.Generator, bool], Dict[str, float]]] = {
    "prop31": _trial_prop31,
    "prop32": _trial_prop32,
    "roundtrip": _trial_roundtrip,
    "contact": _trial_contact,
    "two_route": _trial_two_route,
}


class FuzzSuite(BaseSuite):
    """N ensayos sembrados de un chequeo; reporta la peor desviación"""

    name = "fuzz"

    def __init__(
        self,
        check: str,
        trials: int = FUZZ_TRIALS,
        seed: int = FUZZ_SEED,
        mutate: bool = False,
        threads: int = TF_THREADS,
    ):
        if check not in FUZZ_CHECKS:
            raise ValueError(f"chequeo desconocido: {check} (disponibles: {', '.join(FUZZ_CHECKS)})")
        super().__init__(check, threads)
        self.check = check
        self.trials = int(trials)
        self.seed = int(seed)
        self.mutate = mutate
        self.samples: List[Dict[str, float]] = []

    def execute(self, result: SuiteResult) -> None:
        result.seed = self.seed
        result.extra.update({"trials": self.trials, "mutate": self.mutate})
        trial = FUZZ_CHECKS[self.check]

        def run_one(k: int) -> Dict[str, float]:
            return trial(np.random.default_rng([self.seed, k]), self.mutate)

        self.samples = parallel_map(run_one, list(range(self.trials)), self.threads)
        self.logger.info(f"🎲 {self.trials} ensayos de {self.check} (semilla {self.seed})")

        for key in self.samples[0] if self.samples else []:
            values = np.array([s[key] for s in self.samples])
            worst = int(np.argmax(values))
            details = {
                "worst_trial": worst,
                "mean_deviation": float(np.mean(values)),
                "mutate": self.mutate,
            }
            self.measure(key, lambda: (float(values[worst]), details), TOLERANCES[key])
