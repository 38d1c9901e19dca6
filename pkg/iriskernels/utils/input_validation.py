"""
Input Validation Utilities
命令行输入验证工具模块
"""

from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple

from ..utils.logger import IrisKernelsLogger

logger = IrisKernelsLogger("iriskernels.validation")

MAX_SEED = 2**64 - 1


class InputValidator:
    """输入验证器"""

    # 各类输入文件允许的扩展名
    MANIFEST_EXTENSIONS = {".csv"}
    TABLE_EXTENSIONS = {".csv"}
    KERNEL_EXTENSIONS = {".txt", ".kernels"}
    CONFIG_EXTENSIONS = {".toml"}

    @staticmethod
    def validate_input_file(
        file_path, allowed: Optional[Iterable[str]] = None
    ) -> Tuple[bool, Optional[str]]:
        """
        验证输入文件

        Args:
            file_path: 文件路径
            allowed: 允许的扩展名集合（None 表示不限制）

        Returns:
            (是否有效, 错误消息)
        """
        path = Path(file_path)
        if not path.exists():
            return False, f"文件不存在: {file_path}"
        if not path.is_file():
            return False, f"路径不是文件: {file_path}"
        if allowed is not None:
            allowed = set(allowed)
            if path.suffix.lower() not in allowed:
                logger.warning_path("非常规扩展名", path, f"期望 {', '.join(sorted(allowed))}")
        return True, None

    @staticmethod
    def validate_output_dir(dir_path) -> Tuple[bool, Optional[str]]:
        """输出目录不存在时可创建；存在时必须是目录"""
        path = Path(dir_path)
        if path.exists() and not path.is_dir():
            return False, f"输出路径已存在且不是目录: {dir_path}"
        return True, None

    @staticmethod
    def validate_seed(seed: int) -> Tuple[bool, Optional[str]]:
        if not 0 <= seed <= MAX_SEED:
            return False, f"seed 必须是 64 位无符号整数: {seed}"
        return True, None

    @staticmethod
    def validate_count(value: int, name: str, minimum: int = 1) -> Tuple[bool, Optional[str]]:
        if value < minimum:
            return False, f"{name} 必须 >= {minimum}: {value}"
        return True, None


def validate_cli_inputs(
    input_files: Optional[Dict[str, Any]] = None,
    output_dirs: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    验证子命令的公共输入

    Args:
        input_files: 名称 -> (路径, 允许的扩展名)
        output_dirs: 名称 -> 路径

    Returns:
        验证结果字典，包含 success, errors
    """
    errors = []
    validator = InputValidator()

    for name, (path, allowed) in (input_files or {}).items():
        if path is None:
            continue
        is_valid, error = validator.validate_input_file(path, allowed)
        if not is_valid:
            errors.append(f"{name}: {error}")

    for name, path in (output_dirs or {}).items():
        is_valid, error = validator.validate_output_dir(path)
        if not is_valid:
            errors.append(f"{name}: {error}")

    return {"success": len(errors) == 0, "errors": errors}
