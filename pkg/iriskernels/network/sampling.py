"""
IrisKernels Bit Sampling Layer
默认采样网格与网格结构码的列平移
"""

from typing import Optional, Tuple

import numpy as np

from ..models.arrays import SamplingMap
from ..models.iris_models import BANK_SIZE, IRIS_SHAPE

DEFAULT_GRID_ROWS = tuple(range(4, 64, 8))
DEFAULT_GRID_COLS = tuple(range(8, 512, 16))


def default_sampling_map() -> SamplingMap:
    """8x32 均匀网格：行 {4,12,...,60}，列 {8,24,...,504}，行优先排列"""
    points = [(r, c) for r in DEFAULT_GRID_ROWS for c in DEFAULT_GRID_COLS]
    return SamplingMap.from_points(points, IRIS_SHAPE)


def grid_layout(sampling_map: SamplingMap) -> Optional[Tuple[int, int]]:
    """
    检测行优先规则网格

    要求所有响应图共用点表、点恰为若干行与若干等距列的笛卡尔积，
    且列间距 × 列数 = 图像宽度（平移一个采样列即一次循环平移）。

    Returns:
        (行数, 列数)；不是规则网格时返回 None
    """
    if sampling_map.per_map:
        return None
    points = sampling_map.points
    rows = np.unique(points[:, 0])
    cols = np.unique(points[:, 1])
    n_rows, n_cols = len(rows), len(cols)
    if n_rows * n_cols != len(points):
        return None

    expected = np.stack(np.meshgrid(rows, cols, indexing="ij"), axis=-1).reshape(-1, 2)
    if not np.array_equal(points, expected):
        return None

    width = sampling_map.image_shape[1]
    steps = np.diff(cols)
    step = int(steps[0]) if len(steps) else width
    if np.any(steps != step) or step * n_cols != width:
        return None
    return n_rows, n_cols


def shift_code(vector: np.ndarray, shift: int, layout: Tuple[int, int], maps: int = BANK_SIZE) -> np.ndarray:
    """把码（或掩码位）沿采样列循环平移 shift 列"""
    n_rows, n_cols = layout
    grid = np.asarray(vector).reshape(maps, n_rows, n_cols)
    return np.roll(grid, shift, axis=2).reshape(-1)
