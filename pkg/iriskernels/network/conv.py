"""
IrisKernels Convolution Engine
环面填充、valid 互相关与 sigmoid：单卷积层的前向信号通路
"""

from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from ..utils.error_handler import ImageFormatError


def kernel_pads(kernel_shape: Tuple[int, int]) -> Tuple[int, int]:
    """奇数尺寸核对应的 (pad_y, pad_x)"""
    rows, cols = kernel_shape
    return (rows - 1) // 2, (cols - 1) // 2


def wrap_pad(image: np.ndarray, pad_y: int, pad_x: int) -> np.ndarray:
    """
    环面填充

    padded[r][c] = image[(r - pad_y) mod H][(c - pad_x) mod W]

    Raises:
        ImageFormatError: 填充量为负或不小于图像尺寸
    """
    image = np.asarray(image, dtype=np.float64)
    height, width = image.shape
    if not (0 <= pad_y < height and 0 <= pad_x < width):
        raise ImageFormatError(
            f"wrap pad ({pad_y}, {pad_x}) must be smaller than the image ({height}x{width})"
        )
    return np.pad(image, ((pad_y, pad_y), (pad_x, pad_x)), mode="wrap")


def convolve_valid(padded: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """
    valid 模式互相关（不翻转卷积核）

    out[y][x] = Σ_{u,v} padded[y+u][x+v] · kernel[u][v]

    Raises:
        ImageFormatError: 输入小于卷积核
    """
    padded = np.asarray(padded, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if padded.shape[0] < kernel.shape[0] or padded.shape[1] < kernel.shape[1]:
        raise ImageFormatError(
            f"padded input {padded.shape} is smaller than kernel {kernel.shape}"
        )
    windows = sliding_window_view(padded, kernel.shape)
    return np.einsum("yxuv,uv->yx", windows, kernel)


def sigmoid(x):
    """逐元素 1/(1+exp(-x))，大幅值时饱和而不溢出"""
    return expit(x)


def response_map(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """单个卷积核的完整响应图（与输入同尺寸）"""
    pad_y, pad_x = kernel_pads(kernel.shape)
    return convolve_valid(wrap_pad(image, pad_y, pad_x), kernel)


def gather_patches(image: np.ndarray, points: np.ndarray, kernel_shape: Tuple[int, int]) -> np.ndarray:
    """
    取出每个采样点对应的环面邻域

    patches[p, u, v] = image[(r_p + u - pad_y) mod H][(c_p + v - pad_x) mod W]，
    即采样点处响应对权重 (u, v) 的偏导数。

    Returns:
        np.ndarray: (P, rows, cols)
    """
    height, width = image.shape
    rows, cols = kernel_shape
    pad_y, pad_x = kernel_pads(kernel_shape)
    row_idx = (points[:, 0, None] + np.arange(rows)[None, :] - pad_y) % height
    col_idx = (points[:, 1, None] + np.arange(cols)[None, :] - pad_x) % width
    return image[row_idx[:, :, None], col_idx[:, None, :]]


def sampled_responses(patches: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """采样点处的响应：Σ_{u,v} patch[p,u,v] · kernel[u,v]"""
    return np.einsum("puv,uv->p", patches, kernel)
