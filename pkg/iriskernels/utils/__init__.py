"""
IrisKernels Utilities Package
虹膜核学习工具包
"""

from .logger import (
    data_logger,
    eval_logger,
    network_logger,
    pipeline_logger,
    setup_logger,
    tool_logger,
    train_logger,
)
from .parallel import ordered_map

__all__ = [
    "setup_logger",
    "data_logger",
    "network_logger",
    "train_logger",
    "eval_logger",
    "pipeline_logger",
    "tool_logger",
    "ordered_map",
]
