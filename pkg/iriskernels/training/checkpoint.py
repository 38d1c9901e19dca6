"""
IrisKernels Training Checkpoints
检查点：核组文本文件 + 优化器状态 + 批次计数与训练历史
"""

import json
from pathlib import Path
from typing import Tuple, Union

from ..models.arrays import KernelBank
from ..models.iris_models import TrainConfig, TrainHistory
from ..tools.kernel_io import load_kernels, save_kernels
from ..tools.table_io import write_table
from ..utils.error_handler import DataError
from ..utils.logger import train_logger
from .optimizers import OptimizerState

PathLike = Union[str, Path]

KERNELS_FILE = "kernels.txt"
OPTIMIZER_FILE = "optimizer.npz"
STATE_FILE = "state.json"


def save_checkpoint(
    directory: PathLike,
    bank: KernelBank,
    state: OptimizerState,
    next_batch: int,
    history: TrainHistory,
    config: TrainConfig,
) -> Path:
    """
    写出检查点

    Args:
        directory: 检查点目录
        bank: 当前（未归一化）核组
        state: 优化器状态
        next_batch: 恢复时要执行的下一个批次号
        history: 训练历史（不含耗时）
        config: 训练配置
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_kernels(bank, directory / KERNELS_FILE)
    state.save(directory / OPTIMIZER_FILE)
    payload = {
        "next_batch": next_batch,
        "train_loss": history.train_loss,
        "val_loss": {str(b): v for b, v in sorted(history.val_loss.items())},
        "skipped_triplets": history.skipped_triplets,
        "config": config.model_dump(mode="json"),
    }
    (directory / STATE_FILE).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    train_logger.info_path("保存检查点", directory, next_batch=next_batch)
    return directory


def load_checkpoint(directory: PathLike) -> Tuple[KernelBank, OptimizerState, int, TrainHistory, dict]:
    """
    读取检查点

    Returns:
        (核组, 优化器状态, 下一个批次号, 训练历史, 保存时的配置字典)
    """
    directory = Path(directory)
    state_path = directory / STATE_FILE
    if not state_path.is_file():
        raise DataError(f"no checkpoint found in {directory}", context={"path": str(directory)})

    payload = json.loads(state_path.read_text(encoding="utf-8"))
    bank = load_kernels(directory / KERNELS_FILE)
    state = OptimizerState.load(directory / OPTIMIZER_FILE)
    history = TrainHistory(
        train_loss=payload["train_loss"],
        val_loss={int(b): v for b, v in payload["val_loss"].items()},
        skipped_triplets=payload["skipped_triplets"],
    )
    train_logger.info_path("读取检查点", directory, next_batch=payload["next_batch"])
    return bank, state, int(payload["next_batch"]), history, payload["config"]


def write_history(history: TrainHistory, total_batches: int, path: PathLike) -> Path:
    """
    训练历史 CSV：batch,train_loss,val_loss

    每个批次一行；最后一行（batch = total_batches）只记录训练结束后的验证损失。
    """
    rows = []
    for batch, loss in enumerate(history.train_loss):
        rows.append([batch, loss, history.val_loss.get(batch, "")])
    if history.final_val_loss is not None:
        rows.append([total_batches, "", history.final_val_loss])
    return write_table(rows, ["batch", "train_loss", "val_loss"], path)
