"""
IrisKernels PGM I/O
二进制 PGM (P5, maxval 255) 图像读写
"""

from pathlib import Path
from typing import Tuple, Union

import numpy as np

from ..models.iris_models import IRIS_SHAPE
from ..utils.error_handler import ImageFormatError
from ..utils.logger import tool_logger

PathLike = Union[str, Path]


def _read_header(data: bytes, path: PathLike) -> Tuple[int, int, int, int]:
    """解析 P5 头，返回 (width, height, maxval, 像素起始偏移)"""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        # 跳过空白
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ImageFormatError(f"truncated PGM header: {path}")
        if data[pos : pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])

    if tokens[0] != b"P5":
        raise ImageFormatError(f"not a binary PGM (P5) file: {path}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise ImageFormatError(f"malformed PGM header: {path}") from e
    # 头部之后恰好一个空白字符
    return width, height, maxval, pos + 1


def read_pgm_shape(path: PathLike) -> Tuple[int, int]:
    """只读取头部，返回 (height, width)"""
    with open(path, "rb") as f:
        head = f.read(4096)
    width, height, _, _ = _read_header(head, path)
    return height, width


def read_pgm(path: PathLike) -> np.ndarray:
    """
    读取 8 位 P5 灰度图

    Args:
        path: 文件路径

    Returns:
        np.ndarray: (height, width) uint8 数组

    Raises:
        ImageFormatError: 格式不是 P5 / maxval 不是 255 / 数据截断
    """
    data = Path(path).read_bytes()
    width, height, maxval, offset = _read_header(data, path)
    if maxval != 255:
        raise ImageFormatError(f"PGM maxval must be 255, got {maxval}: {path}")

    payload = data[offset : offset + width * height]
    if len(payload) != width * height:
        raise ImageFormatError(f"truncated PGM pixel data: {path}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path: PathLike, pixels: np.ndarray) -> None:
    """写出 8 位 P5 灰度图"""
    img = np.asarray(pixels)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ImageFormatError("PGM writer expects a 2-D uint8 array")
    height, width = img.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(img).tobytes())
    tool_logger.debug_path("写出PGM", path, size=f"{height}x{width}")


def load_iris_image(path: PathLike, shape: Tuple[int, int] = IRIS_SHAPE) -> np.ndarray:
    """读取归一化虹膜图，除以 255 转为 [0,1] 的 float64"""
    img = read_pgm(path)
    if img.shape != tuple(shape):
        raise ImageFormatError(
            f"image {path} is {img.shape[0]}x{img.shape[1]}, expected {shape[0]}x{shape[1]}"
        )
    return img.astype(np.float64) / 255.0


def load_occlusion_mask(path: PathLike, shape: Tuple[int, int] = IRIS_SHAPE) -> np.ndarray:
    """读取遮挡掩码：像素 >= 128 视为有效 (1)"""
    img = read_pgm(path)
    if img.shape != tuple(shape):
        raise ImageFormatError(
            f"mask {path} is {img.shape[0]}x{img.shape[1]}, expected {shape[0]}x{shape[1]}"
        )
    return img >= 128


def save_iris_image(path: PathLike, pixels: np.ndarray) -> None:
    """把 [0,1] 图像量化为 8 位写出"""
    write_pgm(path, np.clip(np.rint(np.asarray(pixels) * 255.0), 0, 255).astype(np.uint8))


def save_occlusion_mask(path: PathLike, mask: np.ndarray) -> None:
    """掩码写为 0/255"""
    write_pgm(path, np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8))
