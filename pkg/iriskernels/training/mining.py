"""
IrisKernels Batch-hard Mining
批内难负样本挖掘：每个锚点/正样本对从不相交的候选类中选 d_an 最小的负样本
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..data.manifest import IrisImageStore
from ..matching.matcher import masked_distance
from ..models.iris_models import DatasetManifest, MiningCandidate, Triplet
from ..network.coder import combine_masks, sample_mask
from ..utils.error_handler import DegenerateTriplet, InsufficientClassesError
from ..utils.logger import train_logger
from ..utils.parallel import ordered_map
from .triplet_net import TripletNet


def batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    """批次专属随机流，只由 (seed, batch_index) 决定"""
    return np.random.default_rng(np.random.SeedSequence([seed, batch_index]))


def _draw_candidates(
    rng: np.random.Generator, groups, pool_classes: Sequence[str], pool_size: int
) -> List[Tuple[str, str]]:
    chosen = rng.choice(len(pool_classes), size=pool_size, replace=False)
    candidates = []
    for index in chosen:
        class_id = pool_classes[int(index)]
        entries = groups[class_id]
        candidates.append((entries[int(rng.integers(len(entries)))].image, class_id))
    return candidates


def _score_candidates(
    net: TripletNet,
    store: IrisImageStore,
    anchor_features: np.ndarray,
    anchor_mask: np.ndarray,
    candidates: Sequence[Tuple[str, str]],
) -> List[MiningCandidate]:
    scored = []
    for image, class_id in candidates:
        an_mask = sample_mask(combine_masks(anchor_mask, store.mask(image)), net.sampling_map)
        if not an_mask.any():
            scored.append(MiningCandidate(image=image, class_id=class_id, d_an=None))
            continue
        d_an = masked_distance(anchor_features, net.embed(store.image(image)).features, an_mask, an_mask)
        scored.append(MiningCandidate(image=image, class_id=class_id, d_an=d_an))
    return scored


def select_hardest(candidates: Sequence[MiningCandidate]) -> Optional[int]:
    """d_an 最小的候选下标（平局取最小下标）；全部被跳过时返回 None"""
    best = None
    for index, candidate in enumerate(candidates):
        if candidate.d_an is None:
            continue
        if best is None or candidate.d_an < candidates[best].d_an:
            best = index
    return best


def batch_hard_mine(
    net: TripletNet,
    manifest: DatasetManifest,
    store: IrisImageStore,
    batch_size: int,
    pool_size: int,
    seed: int,
    batch_index: int,
    threads: int = 1,
) -> List[Triplet]:
    """
    挖掘一个批次的三元组

    随机取 X 个类别 B，每类随机取锚点与不同的正样本（锚点/正样本对不做挖掘）；
    每对再从 B 之外随机取 pool_size 个类别 B′、每类一幅图像，
    用当前权重计算 d_an，取最小者为负样本。组合掩码为空的候选被跳过，
    全部被跳过时重新抽取一次 B′。

    Args:
        net: 当前网络（整个批次内权重冻结）
        manifest: 训练集清单
        store: 图像缓存
        batch_size: X
        pool_size: 每对的候选类别数
        seed: 随机种子
        batch_index: 批次号
        threads: 候选距离计算的线程数（不影响结果）

    Returns:
        List[Triplet]: X 个三元组，附带候选记录

    Raises:
        InsufficientClassesError: 类别不足
        DegenerateTriplet: 重新抽取后仍没有可用负样本
    """
    groups = manifest.by_class()
    eligible = [cid for cid, entries in groups.items() if len(entries) >= 2]
    if len(eligible) < batch_size:
        raise InsufficientClassesError(
            f"batch needs {batch_size} classes with >= 2 images, only {len(eligible)} available"
        )
    if len(groups) - batch_size < pool_size:
        raise InsufficientClassesError(
            f"mining pool needs {pool_size} classes outside the batch, only {len(groups) - batch_size} left"
        )

    rng = batch_rng(seed, batch_index)
    batch_classes = [eligible[int(i)] for i in rng.choice(len(eligible), size=batch_size, replace=False)]
    in_batch = set(batch_classes)
    pool_classes = [cid for cid in groups if cid not in in_batch]

    pairs = []
    for class_id in batch_classes:
        entries = groups[class_id]
        a, p = rng.choice(len(entries), size=2, replace=False)
        pairs.append((entries[int(a)].image, entries[int(p)].image, class_id))
    candidate_lists = [_draw_candidates(rng, groups, pool_classes, pool_size) for _ in pairs]

    anchor_features = ordered_map(lambda pair: net.embed(store.image(pair[0])).features, pairs, threads)
    scored = ordered_map(
        lambda i: _score_candidates(
            net, store, anchor_features[i], store.mask(pairs[i][0]), candidate_lists[i]
        ),
        range(len(pairs)),
        threads,
    )

    triplets = []
    for i, (anchor, positive, class_id) in enumerate(pairs):
        candidates = scored[i]
        chosen = select_hardest(candidates)
        if chosen is None:
            train_logger.warning(f"锚点 {anchor} 的候选负样本全部无效，重新抽取候选类别")
            redraw = _draw_candidates(rng, groups, pool_classes, pool_size)
            candidates = candidates + _score_candidates(
                net, store, anchor_features[i], store.mask(anchor), redraw
            )
            chosen = select_hardest(candidates)
            if chosen is None:
                raise DegenerateTriplet(f"no scorable negative for anchor {anchor}", context={"batch": batch_index})

        negative = candidates[chosen]
        anchor_mask = store.mask(anchor)
        triplets.append(
            Triplet(
                anchor=anchor,
                positive=positive,
                negative=negative.image,
                anchor_class=class_id,
                negative_class=negative.class_id,
                ap_mask=sample_mask(combine_masks(anchor_mask, store.mask(positive)), net.sampling_map),
                an_mask=sample_mask(combine_masks(anchor_mask, store.mask(negative.image)), net.sampling_map),
                candidates=candidates,
            )
        )
    return triplets
