"""
IrisKernels Iris-Code Files
虹膜码二进制文件：魔数 IRC1 + 码位平面 + 掩码位平面（字节内高位在前）
"""

from pathlib import Path
from typing import Union

import numpy as np

from ..models.iris_models import CODE_LENGTH, IrisCode
from ..utils.error_handler import CodeFormatError

PathLike = Union[str, Path]

MAGIC = b"IRC1"
PLANE_BYTES = CODE_LENGTH // 8


def encode_code_bytes(code: IrisCode) -> bytes:
    """把虹膜码序列化为字节串"""
    if code.bits.shape != (CODE_LENGTH,):
        raise CodeFormatError(f"iris code must hold {CODE_LENGTH} bits, got {code.bits.shape[0]}")
    return (
        MAGIC
        + np.packbits(code.bits, bitorder="big").tobytes()
        + np.packbits(code.mask_bits, bitorder="big").tobytes()
    )


def decode_code_bytes(data: bytes, source: str = "<bytes>") -> IrisCode:
    """从字节串解析虹膜码"""
    if data[: len(MAGIC)] != MAGIC:
        raise CodeFormatError(f"bad magic in iris code file: {source}")
    payload = data[len(MAGIC) :]
    if len(payload) != 2 * PLANE_BYTES:
        raise CodeFormatError(
            f"iris code payload must be {2 * PLANE_BYTES} bytes, got {len(payload)}: {source}"
        )
    planes = np.frombuffer(payload, dtype=np.uint8)
    bits = np.unpackbits(planes[:PLANE_BYTES], bitorder="big").astype(bool)
    mask_bits = np.unpackbits(planes[PLANE_BYTES:], bitorder="big").astype(bool)
    return IrisCode(bits=bits, mask_bits=mask_bits)


def save_code(code: IrisCode, path: PathLike) -> Path:
    """写出虹膜码文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_code_bytes(code))
    return path


def load_code(path: PathLike) -> IrisCode:
    """读取虹膜码文件"""
    return decode_code_bytes(Path(path).read_bytes(), source=str(path))
