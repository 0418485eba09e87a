"""Metrics, evaluation reports and report emission."""

from __future__ import annotations

from .curves import BerCurve
from .emit import BER_FLOOR, emit_report
from .exceptions import EvaluationError, InvalidMetricInputError, ReportFormatError, ReportWriteError
from .metrics import BerCount, ClassScore, ConfusionMatrix, Tally, ber, confusion, within_k_accuracy
from .report import METHODS, STAGES, EvalReport, MethodShare, read_report, write_report

__all__ = [
    "BER_FLOOR",
    "METHODS",
    "STAGES",
    "BerCount",
    "BerCurve",
    "ClassScore",
    "ConfusionMatrix",
    "EvalReport",
    "EvaluationError",
    "InvalidMetricInputError",
    "MethodShare",
    "ReportFormatError",
    "ReportWriteError",
    "Tally",
    "ber",
    "confusion",
    "emit_report",
    "read_report",
    "within_k_accuracy",
    "write_report",
]
