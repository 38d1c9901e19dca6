"""
IrisKernels Matcher
掩码加权分数距离、平移搜索比对与配对打分
"""

from typing import Iterable, List, Mapping, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..models.arrays import SamplingMap
from ..models.iris_models import (
    ExcludedPair,
    IrisCode,
    MatchResult,
    PairKind,
    PairList,
    PairScore,
    ScoreSet,
)
from ..network.sampling import grid_layout, shift_code
from ..utils.error_handler import MissingCodeError, ShiftUnsupported, UnscorableComparison
from ..utils.logger import setup_logger
from ..utils.parallel import ordered_map

logger = setup_logger("iriskernels.matching")


def distance_and_count(s1, s2, m1, m2) -> Tuple[float, int]:
    """
    掩码加权分数距离及共同有效位数

    d = Σ|s1-s2|·m1·m2 / Σ m1·m2；两个输入都是布尔数组时走整数计数路径。

    Raises:
        UnscorableComparison: Σ m1·m2 = 0
    """
    s1 = np.asarray(s1)
    s2 = np.asarray(s2)
    if not (s1.shape == s2.shape == np.shape(m1) == np.shape(m2)):
        raise ValueError("masked_distance needs four arrays of equal length")

    both = np.logical_and(m1, m2)
    valid = int(np.count_nonzero(both))
    if valid == 0:
        raise UnscorableComparison("combined mask has no valid bits")

    if s1.dtype == bool and s2.dtype == bool:
        mismatched = int(np.count_nonzero((s1 ^ s2) & both))
        return mismatched / valid, valid

    weights = both.astype(np.float64)
    diff = np.abs(s1.astype(np.float64) - s2.astype(np.float64))
    return float(np.dot(diff, weights) / weights.sum()), valid


def masked_distance(s1, s2, m1, m2) -> float:
    """掩码加权分数距离（二值输入时即分数汉明距离）"""
    return distance_and_count(s1, s2, m1, m2)[0]


def shift_order(max_shift: int) -> List[int]:
    """搜索顺序 0, -1, 1, -2, 2, ...（决定平局时的取舍）"""
    order = [0]
    for s in range(1, max_shift + 1):
        order.extend((-s, s))
    return order


def match_codes(
    c1: IrisCode, c2: IrisCode, max_shift: int = 0, sampling_map: Optional[SamplingMap] = None
) -> MatchResult:
    """
    比对两个虹膜码

    在 [-max_shift, +max_shift] 内平移 c2 的采样列（掩码位同步平移），取最小距离；
    平局取 |shift| 最小者，其次负平移优先。

    Args:
        c1, c2: 虹膜码
        max_shift: 最大平移（采样列为单位）
        sampling_map: 生成码所用的采样点表；max_shift > 0 时必须是规则网格

    Raises:
        ShiftUnsupported: 非网格点表且 max_shift > 0
        UnscorableComparison: 所有平移下都没有共同有效位
    """
    if max_shift < 0:
        raise ValueError("max_shift must be >= 0")
    if max_shift == 0:
        distance, valid = distance_and_count(c1.bits, c2.bits, c1.mask_bits, c2.mask_bits)
        return MatchResult(distance=distance, valid_bits=valid, shift_used=0)

    layout = grid_layout(sampling_map) if sampling_map is not None else None
    if layout is None:
        raise ShiftUnsupported("shift search needs a grid-structured shared sampling map")
    maps = c1.bits.size // (layout[0] * layout[1])

    best: Optional[MatchResult] = None
    for shift in shift_order(max_shift):
        bits = shift_code(c2.bits, shift, layout, maps)
        mask_bits = shift_code(c2.mask_bits, shift, layout, maps)
        try:
            distance, valid = distance_and_count(c1.bits, bits, c1.mask_bits, mask_bits)
        except UnscorableComparison:
            continue
        if best is None or distance < best.distance:
            best = MatchResult(distance=distance, valid_bits=valid, shift_used=shift)

    if best is None:
        raise UnscorableComparison(f"no scorable shift within ±{max_shift}")
    return best


def score_pairs(
    pair_lists: Iterable[PairList],
    codes: Mapping[str, IrisCode],
    max_shift: int = 0,
    sampling_map: Optional[SamplingMap] = None,
    threads: int = 1,
    progress: bool = False,
) -> ScoreSet:
    """
    为配对列表打分

    无法打分的配对被排除并单独记录；记录顺序与输入配对顺序一致。

    Raises:
        MissingCodeError: 配对引用了没有编码的图像
    """
    jobs = [(a, b, pl.kind) for pl in pair_lists for a, b in pl.pairs]
    missing = sorted({ref for a, b, _ in jobs for ref in (a, b) if ref not in codes})
    if missing:
        raise MissingCodeError(
            f"{len(missing)} referenced images have no code, first: {missing[0]}",
            context={"missing": missing[:10]},
        )

    def score(job):
        a, b, kind = job
        try:
            return match_codes(codes[a], codes[b], max_shift, sampling_map)
        except UnscorableComparison as e:
            return e

    items = tqdm(jobs, desc="比对", unit="pair", disable=not progress)
    results = ordered_map(score, items, threads)

    score_set = ScoreSet()
    for (a, b, kind), result in zip(jobs, results):
        if isinstance(result, UnscorableComparison):
            logger.warning(f"排除无法打分的配对: {a} vs {b} ({kind.value}): {result}")
            score_set.excluded.append(ExcludedPair(path_a=a, path_b=b, kind=kind, reason=str(result)))
            continue
        score_set.records.append(
            PairScore(
                path_a=a,
                path_b=b,
                kind=kind,
                distance=result.distance,
                valid_bits=result.valid_bits,
                shift=result.shift_used,
            )
        )
        (score_set.genuine if kind is PairKind.GENUINE else score_set.impostor).append(result.distance)

    score_set.excluded_count = len(score_set.excluded)
    logger.info(
        f"打分完成: genuine={len(score_set.genuine)}, impostor={len(score_set.impostor)}, "
        f"excluded={score_set.excluded_count}"
    )
    return score_set
