"""
IrisKernels Triplet Losses
软间隔与 hinge 三元组损失及其对 z = d_ap - d_an 的导数
"""

import math
from typing import Tuple

from scipy.special import expit

from ..models.iris_models import LossKind


def soft_margin_loss(d_ap: float, d_an: float) -> float:
    """log(1 + exp(d_ap - d_an))，以 max(z,0) + log1p(exp(-|z|)) 计算"""
    z = d_ap - d_an
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


def hinge_loss(d_ap: float, d_an: float, alpha: float) -> float:
    """max(0, d_ap - d_an + α)"""
    if alpha < 0:
        raise ValueError("hinge margin alpha must be >= 0")
    return max(0.0, d_ap - d_an + alpha)


def triplet_loss(kind: LossKind, d_ap: float, d_an: float, margin: float = 0.0) -> Tuple[float, float]:
    """
    按配置计算损失

    Returns:
        (loss, dL/dz)，其中 dL/dd_ap = dL/dz，dL/dd_an = -dL/dz
    """
    z = d_ap - d_an
    if kind == LossKind.SOFT_MARGIN:
        return soft_margin_loss(d_ap, d_an), float(expit(z))
    loss = hinge_loss(d_ap, d_an, margin)
    return loss, 1.0 if z + margin > 0 else 0.0
