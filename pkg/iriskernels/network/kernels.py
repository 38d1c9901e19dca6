"""
IrisKernels Kernel Bank Initialisation
卷积核组初始化（Gabor / 随机）与零均值归一化
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..models.arrays import KernelBank
from ..models.iris_models import DEFAULT_KERNEL_SIZES, GaborParams
from ..utils.error_handler import KernelFormatError
from ..utils.logger import network_logger

RANDOM_INIT_LIMIT = 0.05
DEFAULT_WAVELENGTHS = (8.0, 16.0, 32.0)


def zero_mean(bank: KernelBank) -> KernelBank:
    """每个卷积核减去自身均值，使权重和为零"""
    return KernelBank.from_arrays([k - k.mean() for k in bank.kernels])


def gabor_kernel(params: GaborParams) -> np.ndarray:
    """
    二维 Gabor 实部

    exp(-(x'^2/2σx^2 + y'^2/2σy^2)) · cos(2πx'/λ + φ)，网格以核中心为原点。
    """
    half_y = (params.rows - 1) / 2.0
    half_x = (params.cols - 1) / 2.0
    y, x = np.mgrid[-half_y : half_y + 1, -half_x : half_x + 1]
    cos_t, sin_t = math.cos(params.orientation), math.sin(params.orientation)
    xr = x * cos_t + y * sin_t
    yr = -x * sin_t + y * cos_t
    envelope = np.exp(-(xr**2 / (2.0 * params.sigma_x**2) + yr**2 / (2.0 * params.sigma_y**2)))
    return envelope * np.cos(2.0 * math.pi * xr / params.wavelength + params.phase)


def default_gabor_spec(
    sizes: Sequence[Tuple[int, int]] = DEFAULT_KERNEL_SIZES,
    wavelengths: Sequence[float] = DEFAULT_WAVELENGTHS,
) -> List[GaborParams]:
    """
    默认 Gabor 参数：每个尺度一偶（φ=0）一奇（φ=π/2），水平方向，
    σx = cols/6，σy = rows/3
    """
    spec = []
    for index, (rows, cols) in enumerate(sizes):
        spec.append(
            GaborParams(
                rows=rows,
                cols=cols,
                wavelength=wavelengths[index // 2],
                orientation=0.0,
                sigma_x=cols / 6.0,
                sigma_y=rows / 3.0,
                phase=0.0 if index % 2 == 0 else math.pi / 2.0,
            )
        )
    return spec


def gabor_init(spec: Optional[Sequence] = None) -> KernelBank:
    """
    由 Gabor 参数生成核组

    Args:
        spec: GaborParams 或等价字典的序列；缺省使用 default_gabor_spec()

    Raises:
        KernelFormatError: σ 或 λ 非正、尺寸不是奇数
    """
    if spec is None:
        spec = default_gabor_spec()
    try:
        params = [p if isinstance(p, GaborParams) else GaborParams(**p) for p in spec]
    except ValidationError as e:
        raise KernelFormatError(f"invalid Gabor parameters: {e.errors()[0]['msg']}") from e

    bank = KernelBank.from_arrays([gabor_kernel(p) for p in params])
    network_logger.debug(f"Gabor 初始化: {bank.shapes}")
    return bank


def random_init(seed: int, sizes: Sequence[Tuple[int, int]] = DEFAULT_KERNEL_SIZES) -> KernelBank:
    """权重独立同分布于 [-0.05, 0.05]，由 seed 唯一确定"""
    rng = np.random.default_rng(seed)
    return KernelBank.from_arrays(
        [rng.uniform(-RANDOM_INIT_LIMIT, RANDOM_INIT_LIMIT, size=tuple(s)) for s in sizes]
    )
