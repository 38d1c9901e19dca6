"""
IrisKernels Optimizers
Adam 与带动量 SGD 的逐核更新，及其可持久化状态
"""

from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..models.arrays import KernelBank
from ..models.iris_models import OptimizerKind, TrainConfig
from ..utils.error_handler import NumericError

PathLike = Union[str, Path]


class OptimizerState(BaseModel):
    """优化器状态：步数与每个卷积核的一阶/二阶矩（SGD 时 first 为速度）"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    step: int = Field(default=0, ge=0)
    first: List[np.ndarray] = Field(default_factory=list)
    second: List[np.ndarray] = Field(default_factory=list)

    @classmethod
    def zeros_like(cls, bank: KernelBank) -> "OptimizerState":
        return cls(
            step=0,
            first=[np.zeros_like(k) for k in bank.kernels],
            second=[np.zeros_like(k) for k in bank.kernels],
        )

    def save(self, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        arrays = {"step": np.array(self.step, dtype=np.int64)}
        for i, (m, v) in enumerate(zip(self.first, self.second)):
            arrays[f"first_{i}"] = m
            arrays[f"second_{i}"] = v
        with open(path, "wb") as f:
            np.savez(f, **arrays)
        return path

    @classmethod
    def load(cls, path: PathLike) -> "OptimizerState":
        with np.load(path) as data:
            count = sum(1 for key in data.files if key.startswith("first_"))
            return cls(
                step=int(data["step"]),
                first=[data[f"first_{i}"].copy() for i in range(count)],
                second=[data[f"second_{i}"].copy() for i in range(count)],
            )


def _check_finite(arrays: Sequence[np.ndarray], what: str, step: int) -> None:
    for index, array in enumerate(arrays):
        if not np.all(np.isfinite(array)):
            raise NumericError(
                f"non-finite {what} in kernel {index} at optimizer step {step}",
                context={
                    "kernel": index,
                    "step": step,
                    "non_finite": int(np.count_nonzero(~np.isfinite(array))),
                },
            )


def adam_step(
    bank: KernelBank,
    grads: Sequence[np.ndarray],
    state: OptimizerState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
) -> Tuple[KernelBank, OptimizerState]:
    """
    一步偏差校正的 Adam 更新

    Raises:
        NumericError: 梯度或更新后的权重出现非有限值
    """
    _check_finite(grads, "gradient", state.step)
    step = state.step + 1
    first, second, kernels = [], [], []
    for w, g, m, v in zip(bank.kernels, grads, state.first, state.second):
        if g.shape != w.shape:
            raise ValueError(f"gradient shape {g.shape} does not match kernel {w.shape}")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * (g * g)
        m_hat = m / (1.0 - beta1**step)
        v_hat = v / (1.0 - beta2**step)
        kernels.append(w - lr * m_hat / (np.sqrt(v_hat) + epsilon))
        first.append(m)
        second.append(v)

    _check_finite(kernels, "weights", step)
    return KernelBank.from_arrays(kernels), OptimizerState(step=step, first=first, second=second)


def sgd_momentum_step(
    bank: KernelBank,
    grads: Sequence[np.ndarray],
    state: OptimizerState,
    lr: float = 1e-3,
    momentum: float = 0.9,
) -> Tuple[KernelBank, OptimizerState]:
    """带动量 SGD：v = μv + g，w = w - lr·v"""
    _check_finite(grads, "gradient", state.step)
    velocity = [momentum * v + g for v, g in zip(state.first, grads)]
    kernels = [w - lr * v for w, v in zip(bank.kernels, velocity)]
    _check_finite(kernels, "weights", state.step + 1)
    return KernelBank.from_arrays(kernels), OptimizerState(
        step=state.step + 1, first=velocity, second=list(state.second)
    )


def optimizer_step(
    config: TrainConfig, bank: KernelBank, grads: Sequence[np.ndarray], state: OptimizerState
) -> Tuple[KernelBank, OptimizerState]:
    """按配置分派优化器"""
    if config.optimizer == OptimizerKind.SGD_MOMENTUM:
        return sgd_momentum_step(bank, grads, state, config.learning_rate, config.momentum)
    return adam_step(bank, grads, state, config.learning_rate, config.beta1, config.beta2, config.epsilon)
