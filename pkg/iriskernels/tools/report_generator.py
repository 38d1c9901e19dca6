"""
IrisKernels Report Generator
评估报告导出：ROC CSV、直方图 CSV、文本摘要与核组对比表
"""

import math
from pathlib import Path
from typing import Dict, List, Sequence, Union

from ..models.iris_models import EvalReport, HistogramBin, RocPoint
from ..utils.error_handler import InsufficientScoresError
from ..utils.logger import eval_logger
from .table_io import read_table, write_table

PathLike = Union[str, Path]

ROC_COLUMNS = ["fmr", "fnmr", "threshold"]
HIST_COLUMNS = ["bin_lo", "bin_hi", "count"]
COMPARISON_COLUMNS = ["bank", "d_prime", "eer", "genuine", "impostor", "excluded"]


def format_d_prime(value: float) -> str:
    return "inf (perfect separation)" if math.isinf(value) else f"{value:.6f}"


class ReportGenerator:
    """报告生成器"""

    def __init__(self):
        self.templates = self._load_templates()

    def _load_templates(self) -> Dict[str, str]:
        """加载报告模板"""
        return {
            "summary": (
                "iriskernels evaluation summary\n"
                "label: {label}\n"
                "d_prime: {d_prime}\n"
                "eer: {eer:.6f}\n"
                "genuine_scores: {genuine}\n"
                "impostor_scores: {impostor}\n"
                "excluded_pairs: {excluded}\n"
            ),
            "comparison_line": "{bank:<24} d'={d_prime:<26} EER={eer:.6f}",
        }

    def generate_summary(self, report: EvalReport, label: str = "") -> str:
        """生成文本摘要"""
        return self.templates["summary"].format(
            label=label or "-",
            d_prime=format_d_prime(report.d_prime),
            eer=report.eer,
            genuine=report.genuine_count,
            impostor=report.impostor_count,
            excluded=report.excluded_count,
        )

    def save_report(self, content: str, filename: str, output_dir: PathLike = "outputs") -> Path:
        """保存报告到文件"""
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        path = output_dir / filename
        path.write_text(content, encoding="utf-8")
        return path

    def export(self, report: EvalReport, output_dir: PathLike, label: str = "") -> List[Path]:
        """
        写出 roc.csv、hist_genuine.csv、hist_impostor.csv、summary.txt

        Raises:
            InsufficientScoresError: 真或假分数为空
        """
        if report.genuine_count == 0 or report.impostor_count == 0:
            raise InsufficientScoresError(
                f"cannot export a report with genuine={report.genuine_count}, "
                f"impostor={report.impostor_count} scores"
            )
        output_dir = Path(output_dir)
        written = [
            write_table(
                [[p.fmr, p.fnmr, p.threshold] for p in report.roc], ROC_COLUMNS, output_dir / "roc.csv"
            ),
            write_histogram(report.hist_genuine, output_dir / "hist_genuine.csv"),
            write_histogram(report.hist_impostor, output_dir / "hist_impostor.csv"),
            self.save_report(self.generate_summary(report, label), "summary.txt", output_dir),
        ]
        eval_logger.info_path("导出评估报告", output_dir, files=len(written))
        return written

    def comparison_table(self, reports: Dict[str, EvalReport], path: PathLike) -> Path:
        """多个核组的对比表 comparison.csv"""
        rows = [
            [name, r.d_prime, r.eer, r.genuine_count, r.impostor_count, r.excluded_count]
            for name, r in reports.items()
        ]
        for name, r in reports.items():
            eval_logger.info(
                self.templates["comparison_line"].format(
                    bank=name, d_prime=format_d_prime(r.d_prime), eer=r.eer
                )
            )
        return write_table(rows, COMPARISON_COLUMNS, path)


def write_histogram(bins: Sequence[HistogramBin], path: PathLike) -> Path:
    return write_table([[b.bin_lo, b.bin_hi, b.count] for b in bins], HIST_COLUMNS, path)


def read_histogram(path: PathLike) -> List[HistogramBin]:
    frame = read_table(path, HIST_COLUMNS, dtypes={"bin_lo": float, "bin_hi": float, "count": int})
    return [
        HistogramBin(bin_lo=float(r.bin_lo), bin_hi=float(r.bin_hi), count=int(r.count))
        for r in frame.itertuples(index=False)
    ]


def read_roc(path: PathLike) -> List[RocPoint]:
    frame = read_table(path, ROC_COLUMNS, dtypes={c: float for c in ROC_COLUMNS})
    return [
        RocPoint(fmr=float(r.fmr), fnmr=float(r.fnmr), threshold=float(r.threshold))
        for r in frame.itertuples(index=False)
    ]


def export_report(report: EvalReport, output_dir: PathLike, label: str = "") -> List[Path]:
    """导出评估报告（见 ReportGenerator.export）"""
    return ReportGenerator().export(report, output_dir, label)
