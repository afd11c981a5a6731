"""
Suites de verificación, una por comando de la CLI
"""

from src.suites.base_suite import BaseSuite
from src.suites.fuzz_suite import FUZZ_CHECKS, FuzzSuite
from src.suites.noether_suite import NoetherSuite
from src.suites.solve_suite import SolveSuite
from src.suites.verify_suite import VerifySuite

__all__ = ["BaseSuite", "FUZZ_CHECKS", "FuzzSuite", "NoetherSuite", "SolveSuite", "VerifySuite"]
