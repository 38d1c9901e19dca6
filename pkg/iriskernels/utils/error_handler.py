"""
IrisKernels Error Handler
统一的异常层级、退出码映射和CLI错误边界
"""

import functools
import traceback
from typing import Any, Callable, Dict, Optional

from ..utils.logger import setup_logger

logger = setup_logger("iriskernels.error_handler")

# CLI 退出码约定
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class IrisKernelsError(Exception):
    """IrisKernels基础异常类"""

    exit_code = EXIT_DATA

    def __init__(
        self, message: str, error_code: Optional[str] = None, context: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message)
        self.error_code = error_code or type(self).__name__
        self.context = context or {}


class UsageError(IrisKernelsError):
    """命令行用法错误"""

    exit_code = EXIT_USAGE


class ConfigurationError(IrisKernelsError):
    """配置相关错误"""

    exit_code = EXIT_USAGE


class DataError(IrisKernelsError):
    """数据相关错误"""

    exit_code = EXIT_DATA


class ManifestError(DataError):
    """清单文件错误（缺失文件、字段不合法、左右眼冲突）"""


class DuplicateEntryError(ManifestError):
    """清单中出现重复的 (class_id, image) 行"""


class ImageFormatError(DataError):
    """图像或掩码格式/尺寸错误"""


class KernelFormatError(DataError):
    """卷积核文件或卷积核组不合法"""


class SamplingMapError(DataError):
    """采样点表不合法"""


class CodeFormatError(DataError):
    """虹膜码文件格式错误"""


class MissingCodeError(DataError):
    """配对列表引用了没有编码的图像"""


class InsufficientClassesError(DataError):
    """类别数量不足以完成采样"""


class InsufficientScoresError(DataError):
    """分数数量不足以计算统计量"""


class UnscorableComparison(DataError):
    """组合掩码没有任何有效位，无法打分"""


class ShiftUnsupported(DataError):
    """采样点表不是规则网格，不支持平移搜索"""


class DegenerateTriplet(DataError):
    """三元组的组合采样掩码全零"""


class NumericError(IrisKernelsError):
    """数值错误（梯度或权重出现非有限值）"""

    exit_code = EXIT_NUMERIC


class ErrorHandler:
    """错误处理器"""

    @staticmethod
    def describe(error: BaseException, stage: Optional[str] = None) -> Dict[str, Any]:
        """
        把异常整理成结构化字典

        Args:
            error: 异常
            stage: 出错阶段

        Returns:
            包含 success/error/error_type/exit_code/context 的字典
        """
        if isinstance(error, IrisKernelsError):
            error_type = error.error_code
            exit_code = error.exit_code
            context = error.context
        elif isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
            error_type = type(error).__name__
            exit_code = EXIT_DATA
            context = {"filename": getattr(error, "filename", None)}
        else:
            error_type = type(error).__name__
            exit_code = EXIT_DATA
            context = {}

        return {
            "success": False,
            "error": f"{stage + ': ' if stage else ''}{error}",
            "error_type": error_type,
            "exit_code": exit_code,
            "context": context,
        }


def cli_error_boundary(stage: str):
    """
    CLI 错误边界装饰器：把异常转换为稳定的退出码

    Args:
        stage: 子命令名称，用于日志
    """

    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> int:
            try:
                return func(*args, **kwargs)
            except (IrisKernelsError, OSError) as e:
                info = ErrorHandler.describe(e, stage)
                logger.error(f"❌ {info['error']} [{info['error_type']}]")
                if info["context"]:
                    logger.error(f"   上下文: {info['context']}")
                logger.debug(f"错误详情: {traceback.format_exc()}")
                return info["exit_code"]

        return wrapper

    return decorator
