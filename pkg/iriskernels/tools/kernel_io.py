"""
IrisKernels Kernel & Sampling-Map Files
卷积核文本文件、采样点表文件与卷积核热图导出
"""

from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from ..models.arrays import KernelBank, SamplingMap
from ..models.iris_models import BANK_SIZE, IRIS_SHAPE, POINTS_PER_MAP
from ..utils.error_handler import KernelFormatError, SamplingMapError
from ..utils.logger import tool_logger
from .pgm import write_pgm

PathLike = Union[str, Path]

PER_MAP_FLAG = "per-map"


def format_weight(value: float) -> str:
    """17 位有效数字，保证往返逐位一致"""
    return format(float(value), ".17g")


# ==================== 卷积核文件 ====================


def save_kernels(bank: KernelBank, path: PathLike) -> Path:
    """
    写出核组文本文件

    格式：第一行为核数量；每个核一行 ``rows cols``，随后 rows 行、每行 cols 个数。
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [str(len(bank.kernels))]
    for kernel in bank.kernels:
        rows, cols = kernel.shape
        lines.append(f"{rows} {cols}")
        for row in kernel:
            lines.append(" ".join(format_weight(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tool_logger.info_path("保存卷积核", path, kernels=len(bank.kernels))
    return path


def load_kernels(path: PathLike) -> KernelBank:
    """
    读取核组文本文件

    Raises:
        KernelFormatError: 格式错误、数量不是 6、尺寸不是奇数
    """
    path = Path(path)
    try:
        lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
    except UnicodeDecodeError as e:
        raise KernelFormatError(f"kernel file is not UTF-8 text: {path}") from e
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise KernelFormatError(f"empty kernel file: {path}")

    cursor = 0

    def next_ints(expected: int) -> List[int]:
        nonlocal cursor
        if cursor >= len(lines):
            raise KernelFormatError(f"unexpected end of kernel file: {path}")
        parts = lines[cursor].split()
        cursor += 1
        try:
            values = [int(p) for p in parts]
        except ValueError as e:
            raise KernelFormatError(f"expected integers on line {cursor} of {path}") from e
        if len(values) != expected:
            raise KernelFormatError(f"expected {expected} integers on line {cursor} of {path}")
        return values

    (count,) = next_ints(1)
    if count != BANK_SIZE:
        raise KernelFormatError(
            f"kernel file declares {count} kernels, a bank needs {BANK_SIZE}: {path}",
            context={"count": count},
        )

    kernels = []
    for index in range(count):
        rows, cols = next_ints(2)
        if rows <= 0 or cols <= 0 or rows % 2 == 0 or cols % 2 == 0:
            raise KernelFormatError(
                f"kernel {index} has size {rows}x{cols}; both must be odd and positive: {path}"
            )
        weights = np.empty((rows, cols), dtype=np.float64)
        for r in range(rows):
            if cursor >= len(lines):
                raise KernelFormatError(f"kernel {index} is truncated: {path}")
            parts = lines[cursor].split()
            cursor += 1
            if len(parts) != cols:
                raise KernelFormatError(f"kernel {index} row {r} has {len(parts)} values, expected {cols}")
            try:
                weights[r] = [float(p) for p in parts]
            except ValueError as e:
                raise KernelFormatError(f"non-numeric weight in kernel {index}: {path}") from e
        kernels.append(weights)

    if cursor != len(lines):
        raise KernelFormatError(f"trailing data after {count} kernels: {path}")

    tool_logger.info_path("读取卷积核", path, shapes=[k.shape for k in kernels])
    return KernelBank.from_arrays(kernels)


# ==================== 采样点表 ====================


def save_sampling_map(sampling_map: SamplingMap, path: PathLike) -> Path:
    """写出采样点表（每行 ``row col``；分图点表以 ``per-map`` 开头）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [PER_MAP_FLAG] if sampling_map.per_map else []
    lists = sampling_map.points if sampling_map.per_map else [sampling_map.points]
    for plist in lists:
        lines.extend(f"{int(r)} {int(c)}" for r, c in plist)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_sampling_map(path: PathLike) -> SamplingMap:
    """
    读取采样点表：256 行 ``row col``，或 ``per-map`` 标志后 6x256 行

    Raises:
        SamplingMapError: 点数不是 256、越界或重复
    """
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    per_map = bool(lines) and lines[0].lower() == PER_MAP_FLAG
    if per_map:
        lines = lines[1:]

    try:
        points = np.array([[int(v) for v in ln.split()] for ln in lines], dtype=np.int64)
    except ValueError as e:
        raise SamplingMapError(f"sampling map lines must be two integers: {path}") from e
    if points.ndim != 2 or (len(points) and points.shape[1] != 2):
        raise SamplingMapError(f"sampling map lines must be two integers: {path}")

    if per_map:
        if len(points) != BANK_SIZE * POINTS_PER_MAP:
            raise SamplingMapError(
                f"per-map sampling file needs {BANK_SIZE}x{POINTS_PER_MAP} points, got {len(points)}"
            )
        points = points.reshape(BANK_SIZE, POINTS_PER_MAP, 2)
    elif len(points) != POINTS_PER_MAP:
        raise SamplingMapError(
            f"sampling map must hold exactly {POINTS_PER_MAP} points, got {len(points)}: {path}"
        )

    tool_logger.info_path("读取采样点表", path, per_map=per_map)
    return SamplingMap.from_points(points, IRIS_SHAPE, expected=POINTS_PER_MAP)


# ==================== 热图导出 ====================


def kernel_to_gray(kernel: np.ndarray) -> np.ndarray:
    """min-max 归一化到 [0,255]；常数核输出中灰 128"""
    lo, hi = float(kernel.min()), float(kernel.max())
    if hi == lo:
        return np.full(kernel.shape, 128, dtype=np.uint8)
    return np.rint((kernel - lo) / (hi - lo) * 255.0).astype(np.uint8)


def write_weight_csv(kernel: np.ndarray, path: PathLike) -> Path:
    """原始权重 CSV（无表头，17 位有效数字）"""
    path = Path(path)
    pd.DataFrame(kernel).to_csv(path, header=False, index=False, float_format="%.17g")
    return path


def read_weight_csv(path: PathLike) -> np.ndarray:
    """读取权重 CSV，逐位还原"""
    return pd.read_csv(path, header=None, float_precision="round_trip").to_numpy(dtype=np.float64)


def export_kernel_heatmaps(bank: KernelBank, out_dir: PathLike) -> List[Path]:
    """
    每个卷积核导出一张 PGM 热图和一份原始权重 CSV

    Returns:
        List[Path]: 写出的文件列表
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for index, kernel in enumerate(bank.kernels):
        rows, cols = kernel.shape
        stem = f"kernel_{index}_{rows}x{cols}"
        pgm_path = out_dir / f"{stem}.pgm"
        write_pgm(pgm_path, kernel_to_gray(kernel))
        written.append(pgm_path)
        written.append(write_weight_csv(kernel, out_dir / f"{stem}.csv"))
    tool_logger.info_path("导出卷积核热图", out_dir, files=len(written))
    return written
