"""
IrisKernels Triplet Network
共享权重的三元组前向计算与手工推导的反向梯度
"""

from typing import List, NamedTuple

import numpy as np

from ..data.manifest import IrisImageStore
from ..matching.matcher import masked_distance
from ..models.arrays import KernelBank, SamplingMap
from ..models.iris_models import LossKind, Triplet
from ..network.coder import sample_patches
from ..network.conv import sampled_responses, sigmoid
from ..utils.error_handler import DegenerateTriplet
from .losses import triplet_loss


class Embedding(NamedTuple):
    """一幅图像的特征向量及各卷积核的采样邻域"""

    features: np.ndarray
    patches: List[np.ndarray]


class ForwardCache(NamedTuple):
    """前向结果，供反向传播使用"""

    d_ap: float
    d_an: float
    loss: float
    dloss_dz: float
    anchor: Embedding
    positive: Embedding
    negative: Embedding
    ap_mask: np.ndarray
    an_mask: np.ndarray


class TripletNet:
    """
    单卷积层 + sigmoid + 固定采样层，三个输入共享同一核组

    Args:
        bank: 当前核组
        sampling_map: 采样点表
        loss: 损失类型
        margin: hinge 损失的 α
    """

    def __init__(
        self,
        bank: KernelBank,
        sampling_map: SamplingMap,
        loss: LossKind = LossKind.SOFT_MARGIN,
        margin: float = 0.3,
    ):
        self.bank = bank
        self.sampling_map = sampling_map
        self.loss = loss
        self.margin = margin

    def embed(self, image: np.ndarray) -> Embedding:
        patches = sample_patches(image, self.bank, self.sampling_map)
        responses = np.concatenate([sampled_responses(p, k) for p, k in zip(patches, self.bank.kernels)])
        return Embedding(features=sigmoid(responses), patches=patches)

    def forward_embeddings(
        self,
        anchor: Embedding,
        positive: Embedding,
        negative: Embedding,
        ap_mask: np.ndarray,
        an_mask: np.ndarray,
    ) -> ForwardCache:
        if not (ap_mask.any() and an_mask.any()):
            raise DegenerateTriplet("combined sampled mask is all zero")
        d_ap = masked_distance(anchor.features, positive.features, ap_mask, ap_mask)
        d_an = masked_distance(anchor.features, negative.features, an_mask, an_mask)
        loss, dloss_dz = triplet_loss(self.loss, d_ap, d_an, self.margin)
        return ForwardCache(d_ap, d_an, loss, dloss_dz, anchor, positive, negative, ap_mask, an_mask)

    def forward_images(
        self,
        anchor: np.ndarray,
        positive: np.ndarray,
        negative: np.ndarray,
        ap_mask: np.ndarray,
        an_mask: np.ndarray,
    ) -> ForwardCache:
        """
        三幅图像的前向计算

        Raises:
            DegenerateTriplet: 任一组合采样掩码全零
        """
        if not (ap_mask.any() and an_mask.any()):
            raise DegenerateTriplet("combined sampled mask is all zero")
        return self.forward_embeddings(
            self.embed(anchor), self.embed(positive), self.embed(negative), ap_mask, an_mask
        )

    def backward(self, cache: ForwardCache) -> List[np.ndarray]:
        """
        损失对每个卷积核权重的解析梯度

        dL/dd_ap = g，dL/dd_an = -g；dd/df = sign(f_x - f_y)·m/Σm（sign(0)=0）；
        df/dr = f(1-f)；dr/dw(u,v) = 采样点邻域 patch[u,v]。
        锚点同时经由 d_ap 与 d_an 贡献梯度。
        """
        g = cache.dloss_dz
        fa = cache.anchor.features
        w_ap = cache.ap_mask / float(np.count_nonzero(cache.ap_mask))
        w_an = cache.an_mask / float(np.count_nonzero(cache.an_mask))
        s_ap = np.sign(fa - cache.positive.features) * w_ap
        s_an = np.sign(fa - cache.negative.features) * w_an

        feature_grads = (
            (cache.anchor, g * (s_ap - s_an)),
            (cache.positive, -g * s_ap),
            (cache.negative, g * s_an),
        )

        grads = []
        start = 0
        for k, kernel in enumerate(self.bank.kernels):
            stop = start + cache.anchor.patches[k].shape[0]
            grad = np.zeros(kernel.shape)
            for embedding, dfeat in feature_grads:
                f = embedding.features[start:stop]
                dresp = dfeat[start:stop] * f * (1.0 - f)
                grad += np.einsum("p,puv->uv", dresp, embedding.patches[k])
            grads.append(grad)
            start = stop
        return grads


def forward(
    bank: KernelBank,
    triplet: Triplet,
    store: IrisImageStore,
    sampling_map: SamplingMap,
    loss: LossKind = LossKind.SOFT_MARGIN,
    margin: float = 0.3,
) -> ForwardCache:
    """按图像引用执行三元组前向计算"""
    net = TripletNet(bank, sampling_map, loss, margin)
    return net.forward_images(
        store.image(triplet.anchor),
        store.image(triplet.positive),
        store.image(triplet.negative),
        triplet.ap_mask,
        triplet.an_mask,
    )


def backward(bank: KernelBank, cache: ForwardCache, sampling_map: SamplingMap) -> List[np.ndarray]:
    """与 forward 配套的梯度计算"""
    return TripletNet(bank, sampling_map).backward(cache)
