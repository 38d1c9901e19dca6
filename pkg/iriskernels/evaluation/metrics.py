"""
IrisKernels Evaluation Metrics
真/假分数分布的可分性 d′、ROC/EER 与直方图
"""

import math
from typing import List, Sequence, Tuple

import numpy as np

from ..models.iris_models import EvalReport, HistogramBin, RocPoint, ScoreSet
from ..utils.error_handler import InsufficientScoresError
from ..utils.logger import eval_logger

HISTOGRAM_BINS = 100
REJECT_ALL_OFFSET = 0.001


def decidability(genuine: Sequence[float], impostor: Sequence[float]) -> float:
    """
    可分性 d′ = |μ_i - μ_g| / sqrt((σ_g² + σ_i²) / 2)，方差取样本方差

    两个分布方差都为零时：均值相等返回 0，否则返回 +inf（完全分离）。

    Raises:
        InsufficientScoresError: 任一列表少于 2 个分数
    """
    g = np.asarray(genuine, dtype=np.float64)
    i = np.asarray(impostor, dtype=np.float64)
    if g.size < 2 or i.size < 2:
        raise InsufficientScoresError(
            f"decidability needs >= 2 scores per list, got genuine={g.size}, impostor={i.size}"
        )
    spread = math.sqrt((g.var(ddof=1) + i.var(ddof=1)) / 2.0)
    gap = abs(float(i.mean()) - float(g.mean()))
    if spread == 0.0:
        return 0.0 if gap == 0.0 else math.inf
    return gap / spread


def roc_curve(genuine: Sequence[float], impostor: Sequence[float]) -> List[RocPoint]:
    """
    阈值扫过全部观测分数（距离 <= t 视为接受）

    第一个点为拒绝全部（阈值 min - 0.001），之后阈值递增。

    Raises:
        InsufficientScoresError: 任一列表为空
    """
    g = np.sort(np.asarray(genuine, dtype=np.float64))
    i = np.sort(np.asarray(impostor, dtype=np.float64))
    if g.size == 0 or i.size == 0:
        raise InsufficientScoresError(
            f"ROC needs nonempty lists, got genuine={g.size}, impostor={i.size}"
        )

    thresholds = np.unique(np.concatenate([g, i]))
    accepted_impostor = np.searchsorted(i, thresholds, side="right")
    accepted_genuine = np.searchsorted(g, thresholds, side="right")
    fmr = accepted_impostor / i.size
    fnmr = (g.size - accepted_genuine) / g.size

    points = [RocPoint(fmr=0.0, fnmr=1.0, threshold=float(thresholds[0]) - REJECT_ALL_OFFSET)]
    points.extend(
        RocPoint(fmr=float(a), fnmr=float(b), threshold=float(t)) for a, b, t in zip(fmr, fnmr, thresholds)
    )
    return points


def equal_error_rate(roc: Sequence[RocPoint]) -> float:
    """
    FMR = FNMR 处的错误率，在相邻扫描点之间线性插值
    """
    previous = None
    for point in roc:
        diff = point.fnmr - point.fmr
        if diff <= 0.0:
            if diff == 0.0 or previous is None:
                return point.fmr
            prev_diff = previous.fnmr - previous.fmr
            t = prev_diff / (prev_diff - diff)
            return previous.fmr + t * (point.fmr - previous.fmr)
        previous = point
    return roc[-1].fmr


def roc_and_eer(genuine: Sequence[float], impostor: Sequence[float]) -> Tuple[List[RocPoint], float]:
    """ROC 点与 EER"""
    roc = roc_curve(genuine, impostor)
    return roc, equal_error_rate(roc)


def histogram(scores: Sequence[float], bins: int = HISTOGRAM_BINS) -> List[HistogramBin]:
    """[0,1] 上等宽分箱的计数"""
    counts, edges = np.histogram(np.asarray(scores, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    return [
        HistogramBin(bin_lo=float(lo), bin_hi=float(hi), count=int(c))
        for lo, hi, c in zip(edges[:-1], edges[1:], counts)
    ]


def evaluate_scores(scores: ScoreSet) -> EvalReport:
    """
    由分数集合生成评估报告

    Raises:
        InsufficientScoresError: 分数不足
    """
    d_prime = decidability(scores.genuine, scores.impostor)
    roc, eer = roc_and_eer(scores.genuine, scores.impostor)
    report = EvalReport(
        d_prime=d_prime,
        eer=eer,
        roc=roc,
        hist_genuine=histogram(scores.genuine),
        hist_impostor=histogram(scores.impostor),
        genuine_count=len(scores.genuine),
        impostor_count=len(scores.impostor),
        excluded_count=scores.excluded_count,
    )
    eval_logger.info(
        f"评估: d′={d_prime:.4f}, EER={eer:.4f}, genuine={report.genuine_count}, "
        f"impostor={report.impostor_count}, excluded={report.excluded_count}"
    )
    return report
