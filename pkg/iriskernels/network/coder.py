"""
IrisKernels Coder
特征向量与二值虹膜码的生成（卷积层 + 采样层）
"""

from typing import List

import numpy as np

from ..models.arrays import KernelBank, SamplingMap
from ..models.iris_models import BANK_SIZE, IrisCode
from ..utils.error_handler import ImageFormatError
from .conv import gather_patches, response_map, sampled_responses, sigmoid


def sample_patches(image: np.ndarray, bank: KernelBank, sampling_map: SamplingMap) -> List[np.ndarray]:
    """每个卷积核在其采样点上的环面邻域，(P, rows, cols) 的列表"""
    _check_image(image, sampling_map)
    return [
        gather_patches(image, sampling_map.points_for(k), kernel.shape)
        for k, kernel in enumerate(bank.kernels)
    ]


def encode_responses(image: np.ndarray, bank: KernelBank, sampling_map: SamplingMap) -> np.ndarray:
    """采样点处的激活前响应，按响应图顺序拼接（map-major）"""
    patches = sample_patches(image, bank, sampling_map)
    return np.concatenate([sampled_responses(p, k) for p, k in zip(patches, bank.kernels)])


def encode_features(image: np.ndarray, bank: KernelBank, sampling_map: SamplingMap) -> np.ndarray:
    """
    特征向量：每个卷积核 wrap_pad → convolve_valid → sigmoid → 采样

    只在采样点处计算响应，数值上与完整响应图路径一致。

    Returns:
        np.ndarray: 长度 6 x P 的 (0,1) 实数向量
    """
    return sigmoid(encode_responses(image, bank, sampling_map))


def response_maps(image: np.ndarray, bank: KernelBank) -> List[np.ndarray]:
    """每个卷积核的完整激活前响应图"""
    return [response_map(image, kernel) for kernel in bank.kernels]


def encode_features_full(image: np.ndarray, bank: KernelBank, sampling_map: SamplingMap) -> np.ndarray:
    """完整响应图路径的特征向量（用于校验和导出）"""
    _check_image(image, sampling_map)
    values = []
    for k, resp in enumerate(response_maps(image, bank)):
        points = sampling_map.points_for(k)
        values.append(sigmoid(resp[points[:, 0], points[:, 1]]))
    return np.concatenate(values)


def binarize(features: np.ndarray) -> np.ndarray:
    """特征值 > 0.5 置 1；恰为 0.5 置 0"""
    return np.asarray(features) > 0.5


def sample_mask(mask: np.ndarray, sampling_map: SamplingMap, maps: int = BANK_SIZE) -> np.ndarray:
    """采样点处的掩码值，按响应图顺序重复（分图点表时各用各的点）"""
    mask = np.asarray(mask, dtype=bool)
    if sampling_map.per_map:
        return np.concatenate(
            [mask[sampling_map.points_for(k)[:, 0], sampling_map.points_for(k)[:, 1]] for k in range(maps)]
        )
    points = sampling_map.points
    return np.tile(mask[points[:, 0], points[:, 1]], maps)


def combine_masks(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """逐元素与"""
    m1 = np.asarray(m1, dtype=bool)
    m2 = np.asarray(m2, dtype=bool)
    if m1.shape != m2.shape:
        raise ImageFormatError(f"cannot combine masks of shapes {m1.shape} and {m2.shape}")
    return m1 & m2


def encode_iris(
    image: np.ndarray, mask: np.ndarray, bank: KernelBank, sampling_map: SamplingMap
) -> IrisCode:
    """一幅图像的二值虹膜码及掩码位"""
    bits = binarize(encode_features(image, bank, sampling_map))
    return IrisCode(bits=bits, mask_bits=sample_mask(mask, sampling_map, len(bank.kernels)))


def _check_image(image: np.ndarray, sampling_map: SamplingMap) -> None:
    if np.shape(image) != tuple(sampling_map.image_shape):
        raise ImageFormatError(
            f"image shape {np.shape(image)} does not match sampling map shape {sampling_map.image_shape}"
        )
