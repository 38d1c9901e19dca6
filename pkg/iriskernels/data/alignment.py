"""
IrisKernels Intra-class Alignment
基于 Pearson 相关系数的类内旋转对齐（循环列平移）
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..models.iris_models import AlignmentResult


def shift_columns(array: np.ndarray, shift: int) -> np.ndarray:
    """沿列方向循环平移：out[:, j] = array[:, (j - shift) mod W]"""
    return np.roll(array, int(shift), axis=1)


def pearson_cc(a: np.ndarray, b: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    """
    样本 Pearson 相关系数

    Args:
        a, b: 同形状实数数组
        mask: 可选的布尔掩码，只使用为 True 的像素

    Returns:
        float: [-1, 1] 内的相关系数；任一输入方差为零（或有效像素少于 2）时为 0
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"pearson_cc needs equal shapes, got {a.shape} and {b.shape}")
    if mask is not None:
        a = a[mask]
        b = b[mask]
    a = a.ravel()
    b = b.ravel()
    if a.size < 2:
        return 0.0

    a0 = a - a.mean()
    b0 = b - b.mean()
    denom = np.sqrt(np.dot(a0, a0) * np.dot(b0, b0))
    if denom == 0.0:
        return 0.0
    return float(np.clip(np.dot(a0, b0) / denom, -1.0, 1.0))


def shift_correlations(reference: np.ndarray, image: np.ndarray) -> np.ndarray:
    """
    所有循环列平移下的 PCC

    corr[s] = pearson_cc(reference, shift_columns(image, s))，s ∈ [0, W)。
    平移不改变均值和范数，只需一次列互相关矩阵。
    """
    a0 = reference - reference.mean()
    b0 = image - image.mean()
    denom = np.sqrt(np.sum(a0 * a0) * np.sum(b0 * b0))
    width = reference.shape[1]
    if denom == 0.0:
        return np.zeros(width)

    cols = a0.T @ b0  # cols[j, k] = Σ_r a0[r, j] b0[r, k]
    j = np.arange(width)
    s = np.arange(width)[:, None]
    return cols[j[None, :], (j[None, :] - s) % width].sum(axis=1) / denom


def masked_shift_correlations(
    reference: np.ndarray, ref_mask: np.ndarray, image: np.ndarray, mask: np.ndarray
) -> np.ndarray:
    """只用两幅（平移后）掩码共同有效像素的逐平移 PCC"""
    width = reference.shape[1]
    corr = np.empty(width)
    for s in range(width):
        corr[s] = pearson_cc(
            reference, shift_columns(image, s), mask=ref_mask & shift_columns(mask, s)
        )
    return corr


def _pcc_matrix(images: Sequence[np.ndarray], masks: Sequence[np.ndarray], mask_aware: bool) -> np.ndarray:
    n = len(images)
    matrix = np.zeros((n, n))
    for i in range(n):
        matrix[i, i] = pearson_cc(images[i], images[i], mask=masks[i] if mask_aware else None)
        for j in range(i + 1, n):
            mask = masks[i] & masks[j] if mask_aware else None
            matrix[i, j] = matrix[j, i] = pearson_cc(images[i], images[j], mask=mask)
    return matrix


def align_class(
    images: Sequence[np.ndarray], masks: Sequence[np.ndarray], mask_aware: bool = False
) -> Tuple[AlignmentResult, List[np.ndarray], List[np.ndarray]]:
    """
    对齐一个类别的全部图像

    参考图像为与类内全部图像（含自身）平均 PCC 最高者，平局取最小下标；
    其余图像平移到与参考图像 PCC 最大的列平移 [0, W)，平局取最小平移。
    掩码按相同平移量移动。

    Args:
        images: 同一类别的归一化图像
        masks: 对应的遮挡掩码
        mask_aware: 是否只在共同有效像素上计算 PCC

    Returns:
        (AlignmentResult, 平移后的图像, 平移后的掩码)
    """
    if len(images) == 0:
        raise ValueError("align_class needs at least one image")
    if len(images) != len(masks):
        raise ValueError("images and masks must pair up")

    matrix = _pcc_matrix(images, masks, mask_aware)
    reference_index = int(np.argmax(matrix.mean(axis=1)))
    reference = images[reference_index]
    ref_mask = masks[reference_index]

    shifts = []
    for index, (image, mask) in enumerate(zip(images, masks)):
        if index == reference_index:
            shifts.append(0)
            continue
        if mask_aware:
            corr = masked_shift_correlations(reference, ref_mask, image, mask)
        else:
            corr = shift_correlations(reference, image)
        shifts.append(int(np.argmax(corr)))

    result = AlignmentResult(reference_index=reference_index, shifts=shifts)
    shifted_images = [shift_columns(img, s) for img, s in zip(images, shifts)]
    shifted_masks = [shift_columns(m, s) for m, s in zip(masks, shifts)]
    return result, shifted_images, shifted_masks
