"""
IrisKernels Array Types
携带 numpy 数组的领域类型：归一化虹膜、遮挡掩码、卷积核组、采样点表
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..utils.error_handler import ImageFormatError, KernelFormatError, SamplingMapError
from .iris_models import BANK_SIZE, IRIS_SHAPE


def as_normalized_iris(pixels, shape: Tuple[int, int] = IRIS_SHAPE) -> np.ndarray:
    """
    校验并返回归一化虹膜图像（float64，取值 [0,1]）

    Raises:
        ImageFormatError: 尺寸或取值不合法
    """
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.shape != tuple(shape):
        raise ImageFormatError(
            f"normalized iris must be {shape[0]}x{shape[1]}, got {'x'.join(map(str, arr.shape))}",
            context={"shape": arr.shape},
        )
    if not np.all(np.isfinite(arr)) or arr.min(initial=0.0) < 0.0 or arr.max(initial=0.0) > 1.0:
        raise ImageFormatError("normalized iris pixels must lie in [0, 1]")
    return arr


def as_occlusion_mask(bits, shape: Tuple[int, int] = IRIS_SHAPE) -> np.ndarray:
    """
    校验并返回遮挡掩码（bool，1 = 有效虹膜像素）

    Raises:
        ImageFormatError: 尺寸不符或取值不在 {0,1}
    """
    arr = np.asarray(bits)
    if arr.shape != tuple(shape):
        raise ImageFormatError(
            f"occlusion mask must be {shape[0]}x{shape[1]}, got {'x'.join(map(str, arr.shape))}",
            context={"shape": arr.shape},
        )
    if arr.dtype != bool:
        if not np.all((arr == 0) | (arr == 1)):
            raise ImageFormatError("occlusion mask values must be 0 or 1")
        arr = arr.astype(bool)
    return arr


class KernelBank(BaseModel):
    """六个实值卷积核组成的核组（三个尺度各一对）"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kernels: List[np.ndarray] = Field(description="按顺序排列的卷积核，行列均为奇数")

    @model_validator(mode="after")
    def _check_kernels(self) -> "KernelBank":
        if len(self.kernels) != BANK_SIZE:
            raise ValueError(f"a kernel bank holds exactly {BANK_SIZE} kernels, got {len(self.kernels)}")
        for i, k in enumerate(self.kernels):
            if k.ndim != 2:
                raise ValueError(f"kernel {i} must be 2-D")
            rows, cols = k.shape
            if rows % 2 == 0 or cols % 2 == 0:
                raise ValueError(f"kernel {i} has even size {rows}x{cols}; rows and cols must be odd")
            if not np.all(np.isfinite(k)):
                raise ValueError(f"kernel {i} contains non-finite weights")
        return self

    @classmethod
    def from_arrays(cls, arrays: Sequence) -> "KernelBank":
        """从数组序列构建核组，拷贝为 float64"""
        try:
            return cls(kernels=[np.array(a, dtype=np.float64, copy=True) for a in arrays])
        except ValidationError as e:
            raise KernelFormatError(str(e.errors()[0]["msg"])) from e

    @property
    def shapes(self) -> List[Tuple[int, int]]:
        return [tuple(k.shape) for k in self.kernels]

    def sums(self) -> List[float]:
        return [float(k.sum()) for k in self.kernels]


class SamplingMap(BaseModel):
    """
    采样点表：从每张响应图读取码位的 (row, col) 坐标

    默认所有响应图共用一张点表；per_map=True 时每张图各有一张点表。
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(description="(P,2) 共用点表，或 (BANK_SIZE,P,2) 分图点表")
    image_shape: Tuple[int, int] = Field(default=IRIS_SHAPE)

    @model_validator(mode="after")
    def _check_points(self) -> "SamplingMap":
        pts = self.points
        if pts.ndim == 2:
            lists = [pts]
        elif pts.ndim == 3 and pts.shape[0] == BANK_SIZE:
            lists = list(pts)
        else:
            raise ValueError("points must have shape (P, 2) or (6, P, 2)")
        height, width = self.image_shape
        for plist in lists:
            if plist.shape[-1] != 2 or len(plist) == 0:
                raise ValueError("each point list needs at least one (row, col) pair")
            rows, cols = plist[:, 0], plist[:, 1]
            if rows.min() < 0 or rows.max() >= height or cols.min() < 0 or cols.max() >= width:
                raise ValueError(f"sampling point out of range for a {height}x{width} image")
            if len({(int(r), int(c)) for r, c in plist}) != len(plist):
                raise ValueError("sampling map contains duplicate points")
        return self

    @classmethod
    def from_points(
        cls, points, image_shape: Tuple[int, int] = IRIS_SHAPE, expected: Optional[int] = None
    ) -> "SamplingMap":
        """
        构建采样点表

        Args:
            points: (P,2) 或 (6,P,2) 整数坐标
            image_shape: 响应图尺寸
            expected: 每张点表要求的点数（文件加载时为 256）

        Raises:
            SamplingMapError: 点数、范围或重复点不合法
        """
        arr = np.asarray(points, dtype=np.int64)
        if expected is not None and arr.ndim >= 2 and arr.shape[-2] != expected:
            raise SamplingMapError(f"sampling map must hold exactly {expected} points, got {arr.shape[-2]}")
        try:
            return cls(points=arr, image_shape=tuple(image_shape))
        except ValidationError as e:
            raise SamplingMapError(str(e.errors()[0]["msg"])) from e

    @property
    def per_map(self) -> bool:
        return self.points.ndim == 3

    @property
    def points_per_map(self) -> int:
        return int(self.points.shape[-2])

    def points_for(self, map_index: int) -> np.ndarray:
        """第 map_index 张响应图使用的 (P,2) 点表"""
        return self.points[map_index] if self.per_map else self.points
