"""
IrisKernels Evaluation
分数分布、ROC/EER、可分性与报告导出
"""

from ..tools.report_generator import ReportGenerator, export_report, read_histogram, read_roc
from .metrics import (
    decidability,
    equal_error_rate,
    evaluate_scores,
    histogram,
    roc_and_eer,
    roc_curve,
)

__all__ = [
    "decidability",
    "roc_curve",
    "equal_error_rate",
    "roc_and_eer",
    "histogram",
    "evaluate_scores",
    "export_report",
    "ReportGenerator",
    "read_roc",
    "read_histogram",
]
