"""
IrisKernels Pair Lists
真/假比对列表生成：全部类内组合 + 按参考类抽样的类间比对
"""

import hashlib
from itertools import combinations
from typing import Dict, List

import numpy as np

from ..models.iris_models import DatasetManifest, PairKind, PairList
from ..utils.logger import data_logger


def class_key(class_id: str) -> int:
    """类别标识的稳定 64 位整数键（blake2b）"""
    digest = hashlib.blake2b(class_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def impostor_stream(seed: int, class_id: str) -> np.random.Generator:
    """
    参考类别专属的计数器型随机流

    由 (seed, class_id) 唯一确定；第 i 次比对消耗流中的第 i 对均匀数，
    因此各参考类可以独立并行生成。
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, class_key(class_id)])))


def generate_genuine_pairs(manifest: DatasetManifest) -> PairList:
    """
    生成全部真比对

    每个有 k 幅图像的类别贡献 k(k-1)/2 个无序对，按类别顺序拼接。

    Args:
        manifest: 数据集清单

    Returns:
        PairList: kind=genuine
    """
    pairs = []
    for class_id, entries in manifest.by_class().items():
        images = [e.image for e in entries]
        pairs.extend(combinations(images, 2))

    data_logger.info(f"生成真比对 {len(pairs)} 个")
    return PairList.model_construct(kind=PairKind.GENUINE, pairs=pairs)


def generate_impostor_pairs(manifest: DatasetManifest, seed: int) -> PairList:
    """
    生成假比对

    对每个参考类别 c（按 class_id 排序），对同眼别的每个其它类别 c′ 输出一对
    (c 的随机图像, c′ 的随机图像)；参考图像每次比对都重新抽取。
    眼别 unknown 的类别自成一组。

    Args:
        manifest: 数据集清单
        seed: 64 位随机种子

    Returns:
        PairList: kind=impostor，长度为 Σ_side C_s(C_s-1)
    """
    groups = manifest.by_class()
    by_side: Dict[str, List[str]] = {}
    for class_id in groups:
        by_side.setdefault(groups[class_id][0].eye_side.value, []).append(class_id)

    flat_images = np.array([e.image for cid in groups for e in groups[cid]], dtype=object)
    offsets: Dict[str, int] = {}
    counts: Dict[str, int] = {}
    cursor = 0
    for class_id, entries in groups.items():
        offsets[class_id] = cursor
        counts[class_id] = len(entries)
        cursor += len(entries)

    pairs = []
    for class_id in groups:
        side_classes = by_side[groups[class_id][0].eye_side.value]
        others = [c for c in side_classes if c != class_id]
        if not others:
            continue

        other_offsets = np.array([offsets[c] for c in others], dtype=np.int64)
        other_counts = np.array([counts[c] for c in others], dtype=np.int64)

        draws = impostor_stream(seed, class_id).random((len(others), 2))
        ref_index = offsets[class_id] + (draws[:, 0] * counts[class_id]).astype(np.int64)
        other_index = other_offsets + (draws[:, 1] * other_counts).astype(np.int64)

        pairs.extend(zip(flat_images[ref_index].tolist(), flat_images[other_index].tolist()))

    data_logger.info(f"生成假比对 {len(pairs)} 个 (seed={seed})")
    return PairList.model_construct(kind=PairKind.IMPOSTOR, pairs=pairs)
