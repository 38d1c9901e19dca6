"""
IrisKernels Configuration File
虹膜核学习系统配置文件
"""

import os
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import load_dotenv
from pydantic import ValidationError

from iriskernels.models.iris_models import TrainConfig
from iriskernels.utils.error_handler import ConfigurationError
from iriskernels.utils.logger import setup_logger

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# Load environment variables
load_dotenv()

logger = setup_logger("iriskernels.config")


class DataConfig:
    """数据配置"""

    # 合成数据集默认规模 - 支持环境变量覆盖
    SYNTH_CLASSES = int(os.getenv("SYNTH_CLASSES", "32"))
    SYNTH_IMAGES_PER_CLASS = int(os.getenv("SYNTH_IMAGES_PER_CLASS", "10"))


class TrainingConfig:
    """训练配置"""

    # 默认 TOML 配置文件（--config 优先）
    CONFIG_FILE = os.getenv("IRISKERNELS_CONFIG", "")

    # 初始化方式: random / gabor / file
    INIT_CHOICES = ["random", "gabor", "file"]
    DEFAULT_INIT = os.getenv("TRAIN_INIT", "gabor")


class OutputConfig:
    """输出配置"""

    OUTPUT_DIR = os.getenv("OUTPUT_DIR", "outputs")


class ParallelConfig:
    """并行配置"""

    # 线程数不影响任何输出
    MAX_WORKERS = int(os.getenv("MAX_WORKERS", "1"))


class LoggingConfig:
    """日志配置"""

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("LOG_DIR", "logs")
    LOG_FILE = os.getenv("LOG_FILE", "")  # 为空时只输出到控制台
    LOG_FORMAT = os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")


LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    读取 TOML 训练配置

    Args:
        path: 配置文件路径；键可以平铺，也可以放在 [train] 表中

    Returns:
        训练配置键值

    Raises:
        ConfigurationError: 文件不存在或不是合法 TOML
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            values = tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigurationError(f"config file not found: {path}", context={"path": str(path)}) from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"config file is not valid TOML: {path}: {e}") from e

    if "train" in values:
        if not isinstance(values["train"], dict):
            raise ConfigurationError(f"[train] in {path} must be a table")
        return dict(values["train"])
    return values


def build_train_config(
    file_values: Optional[Mapping[str, Any]] = None, overrides: Optional[Mapping[str, Any]] = None
) -> TrainConfig:
    """
    合并配置文件与命令行参数（命令行优先，值为 None 的参数视为未给出）

    Raises:
        ConfigurationError: 未知键或取值不合法
    """
    merged: Dict[str, Any] = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(merged) - set(TrainConfig.model_fields))
    if unknown:
        raise ConfigurationError(f"unknown training config keys: {', '.join(unknown)}")
    try:
        return TrainConfig(**merged)
    except ValidationError as e:
        raise ConfigurationError(f"invalid training config: {e}") from e


def validate_config() -> bool:
    """验证配置是否合法（不要求任何环境变量）"""
    problems = []
    if LoggingConfig.LOG_LEVEL.upper() not in LOG_LEVELS:
        problems.append(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")
    if ParallelConfig.MAX_WORKERS < 1:
        problems.append("MAX_WORKERS must be >= 1")
    if TrainingConfig.DEFAULT_INIT not in TrainingConfig.INIT_CHOICES:
        problems.append(f"TRAIN_INIT must be one of {', '.join(TrainingConfig.INIT_CHOICES)}")
    if DataConfig.SYNTH_CLASSES < 1 or DataConfig.SYNTH_IMAGES_PER_CLASS < 1:
        problems.append("SYNTH_CLASSES and SYNTH_IMAGES_PER_CLASS must be >= 1")

    for problem in problems:
        logger.error(f"配置错误: {problem}")
    return not problems


def setup_directories():
    """创建必要的目录"""
    if LoggingConfig.LOG_FILE:
        os.makedirs(LoggingConfig.LOG_DIR, exist_ok=True)


if __name__ == "__main__":
    # 验证配置
    if validate_config():
        logger.info("Configuration validation passed!")
        setup_directories()
    else:
        logger.error("Configuration validation failed!")
