"""
IrisKernels Persistent Validation Set
固定的随机验证三元组（不挖掘），持久化为 CSV 以便每次评估使用同一集合
"""

from pathlib import Path
from typing import List, Union

import numpy as np

from ..data.manifest import IrisImageStore
from ..models.arrays import SamplingMap
from ..models.iris_models import DatasetManifest, Triplet
from ..network.coder import combine_masks, sample_mask
from ..tools.table_io import read_table, write_table
from ..utils.error_handler import DataError, InsufficientClassesError
from ..utils.logger import train_logger

PathLike = Union[str, Path]

VALIDATION_COLUMNS = ["anchor", "positive", "negative", "anchor_class", "negative_class"]
# 与挖掘随机流区分的固定键
VALIDATION_STREAM = 0x76616C


def make_triplet(
    store: IrisImageStore,
    sampling_map: SamplingMap,
    anchor: str,
    positive: str,
    negative: str,
    anchor_class: str,
    negative_class: str,
) -> Triplet:
    """按图像引用构建三元组并计算组合采样掩码"""
    anchor_mask = store.mask(anchor)
    return Triplet(
        anchor=anchor,
        positive=positive,
        negative=negative,
        anchor_class=anchor_class,
        negative_class=negative_class,
        ap_mask=sample_mask(combine_masks(anchor_mask, store.mask(positive)), sampling_map),
        an_mask=sample_mask(combine_masks(anchor_mask, store.mask(negative)), sampling_map),
    )


def build_validation_set(
    manifest_val: DatasetManifest,
    store: IrisImageStore,
    sampling_map: SamplingMap,
    count: int = 2048,
    seed: int = 0,
) -> List[Triplet]:
    """
    生成固定的随机验证三元组

    组合掩码为空的抽样被丢弃并重抽，因此集合中的三元组都可打分。

    Args:
        manifest_val: 验证集清单（类别与训练集不相交）
        store: 图像缓存
        sampling_map: 采样点表
        count: 三元组数量
        seed: 随机种子

    Raises:
        InsufficientClassesError: 少于两个类别，或没有含两幅以上图像的类别
    """
    groups = manifest_val.by_class()
    class_ids = list(groups)
    eligible = [cid for cid in class_ids if len(groups[cid]) >= 2]
    if len(class_ids) < 2 or not eligible:
        raise InsufficientClassesError(
            f"validation needs >= 2 classes and one with >= 2 images, got {len(class_ids)} classes"
        )

    rng = np.random.default_rng(np.random.SeedSequence([seed, VALIDATION_STREAM]))
    triplets: List[Triplet] = []
    attempts = 0
    while len(triplets) < count:
        attempts += 1
        if attempts > 20 * count:
            raise InsufficientClassesError("too many validation draws have empty combined masks")

        anchor_class = eligible[int(rng.integers(len(eligible)))]
        entries = groups[anchor_class]
        a, p = rng.choice(len(entries), size=2, replace=False)
        others = [cid for cid in class_ids if cid != anchor_class]
        negative_class = others[int(rng.integers(len(others)))]
        negatives = groups[negative_class]
        n = int(rng.integers(len(negatives)))

        triplet = make_triplet(
            store,
            sampling_map,
            entries[int(a)].image,
            entries[int(p)].image,
            negatives[n].image,
            anchor_class,
            negative_class,
        )
        if triplet.is_degenerate:
            continue
        triplets.append(triplet)

    train_logger.info(f"构建验证集: {len(triplets)} 个三元组, {len(class_ids)} 个类别")
    return triplets


def save_validation_set(triplets: List[Triplet], path: PathLike) -> Path:
    rows = [[t.anchor, t.positive, t.negative, t.anchor_class, t.negative_class] for t in triplets]
    return write_table(rows, VALIDATION_COLUMNS, path)


def load_validation_set(path: PathLike, store: IrisImageStore, sampling_map: SamplingMap) -> List[Triplet]:
    """读取持久化验证集，组合掩码按当前图像重新计算"""
    frame = read_table(path, VALIDATION_COLUMNS)
    known = set(store.manifest.class_ids())
    triplets = []
    for row in frame.itertuples(index=False):
        if row.anchor_class not in known or row.negative_class not in known:
            raise DataError(f"validation triplet {row.anchor!r} uses a class outside the manifest")
        triplets.append(
            make_triplet(
                store, sampling_map, row.anchor, row.positive, row.negative, row.anchor_class, row.negative_class
            )
        )
    train_logger.info_path("读取验证集", path, triplets=len(triplets))
    return triplets
