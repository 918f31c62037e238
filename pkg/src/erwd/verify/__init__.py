from .catalog import ACCEPTANCE, THEOREMS, run_acceptance, run_theorem
from .report import VerifyReport, assemble_report, fingerprint
from .stats import (
    TestResult,
    discrete_cluster_check,
    geometric_fit,
    ks_check,
    ks_mixed,
    moment_check,
    value_check,
    variance_check,
)

__all__ = [
    "ACCEPTANCE", "THEOREMS", "run_acceptance", "run_theorem",
    "VerifyReport", "assemble_report", "fingerprint",
    "TestResult", "discrete_cluster_check", "geometric_fit", "ks_check", "ks_mixed",
    "moment_check", "value_check", "variance_check",
]
