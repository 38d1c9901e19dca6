"""
IrisKernels Training
三元组损失、难负样本挖掘、手工梯度与训练循环
"""

from .checkpoint import load_checkpoint, save_checkpoint, write_history
from .losses import hinge_loss, soft_margin_loss, triplet_loss
from .mining import batch_hard_mine, select_hardest
from .optimizers import OptimizerState, adam_step, optimizer_step, sgd_momentum_step
from .trainer import KernelTrainer, train
from .triplet_net import Embedding, ForwardCache, TripletNet, backward, forward
from .validation_set import build_validation_set, load_validation_set, save_validation_set

__all__ = [
    "soft_margin_loss",
    "hinge_loss",
    "triplet_loss",
    "TripletNet",
    "Embedding",
    "ForwardCache",
    "forward",
    "backward",
    "batch_hard_mine",
    "select_hardest",
    "OptimizerState",
    "adam_step",
    "sgd_momentum_step",
    "optimizer_step",
    "build_validation_set",
    "save_validation_set",
    "load_validation_set",
    "save_checkpoint",
    "load_checkpoint",
    "write_history",
    "KernelTrainer",
    "train",
]
