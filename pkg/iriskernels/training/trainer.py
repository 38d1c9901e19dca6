"""
IrisKernels Trainer
卷积核组训练循环：挖掘 → 前向/反向 → 批内平均梯度 → 优化器更新，
周期性验证与检查点，可从检查点逐位一致地恢复
"""

import math
import time
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from ..data.manifest import IrisImageStore
from ..models.arrays import KernelBank, SamplingMap
from ..models.iris_models import DatasetManifest, TrainConfig, TrainHistory, Triplet
from ..network.kernels import zero_mean
from ..network.sampling import default_sampling_map
from ..tools.kernel_io import save_kernels
from ..utils.error_handler import ManifestError
from ..utils.logger import train_logger
from ..utils.parallel import ordered_map
from .checkpoint import STATE_FILE, load_checkpoint, save_checkpoint, write_history
from .mining import batch_hard_mine
from .optimizers import OptimizerState, optimizer_step
from .triplet_net import TripletNet
from .validation_set import build_validation_set, load_validation_set, save_validation_set

PathLike = Union[str, Path]
BatchCallback = Callable[[int, KernelBank, List[Triplet]], None]

CHECKPOINT_DIR = "checkpoint"
VALIDATION_FILE = "validation_triplets.csv"


class KernelTrainer:
    """
    卷积核组训练器

    Args:
        config: 训练配置
        sampling_map: 采样点表（缺省为 8x32 网格）
        out_dir: 输出目录；为 None 时不写任何文件
        progress: 是否显示进度条
    """

    def __init__(
        self,
        config: TrainConfig,
        sampling_map: Optional[SamplingMap] = None,
        out_dir: Optional[PathLike] = None,
        progress: bool = False,
    ):
        self.config = config
        self.sampling_map = sampling_map or default_sampling_map()
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.progress = progress

    def _net(self, bank: KernelBank) -> TripletNet:
        return TripletNet(bank, self.sampling_map, self.config.loss, self.config.margin)

    def validation_loss(self, bank: KernelBank, triplets: List[Triplet], store: IrisImageStore) -> float:
        """固定验证集上的平均损失"""
        net = self._net(bank)

        def loss_of(t: Triplet) -> float:
            return net.forward_images(
                store.image(t.anchor), store.image(t.positive), store.image(t.negative), t.ap_mask, t.an_mask
            ).loss

        losses = ordered_map(loss_of, triplets, self.config.threads)
        return float(sum(losses) / len(losses))

    def _batch_gradients(
        self, net: TripletNet, triplets: List[Triplet], store: IrisImageStore
    ) -> Tuple[Optional[List[np.ndarray]], float, int]:
        """批内非退化三元组的平均梯度与平均损失（按三元组下标顺序归约）"""

        def run(t: Triplet):
            if t.is_degenerate:
                return None
            cache = net.forward_images(
                store.image(t.anchor), store.image(t.positive), store.image(t.negative), t.ap_mask, t.an_mask
            )
            return cache.loss, net.backward(cache)

        results = ordered_map(run, triplets, self.config.threads)
        skipped = 0
        total_loss = 0.0
        grads = [np.zeros_like(k) for k in net.bank.kernels]
        used = 0
        for triplet, result in zip(triplets, results):
            if result is None:
                skipped += 1
                train_logger.warning(
                    f"跳过退化三元组: anchor={triplet.anchor}, positive={triplet.positive}, "
                    f"negative={triplet.negative}"
                )
                continue
            loss, triplet_grads = result
            total_loss += loss
            for acc, g in zip(grads, triplet_grads):
                acc += g
            used += 1

        if used == 0:
            return None, math.nan, skipped
        return [g / used for g in grads], total_loss / used, skipped

    def _validation_triplets(
        self, manifest_val: DatasetManifest, store: IrisImageStore, resume: bool
    ) -> List[Triplet]:
        path = self.out_dir / VALIDATION_FILE if self.out_dir is not None else None
        if resume and path is not None and path.is_file():
            return load_validation_set(path, store, self.sampling_map)
        triplets = build_validation_set(
            manifest_val, store, self.sampling_map, self.config.validation_triplets, self.config.seed
        )
        if path is not None:
            save_validation_set(triplets, path)
        return triplets

    def train(
        self,
        manifest_train: DatasetManifest,
        manifest_val: DatasetManifest,
        init_bank: KernelBank,
        resume: bool = False,
        train_store: Optional[IrisImageStore] = None,
        val_store: Optional[IrisImageStore] = None,
        on_batch: Optional[BatchCallback] = None,
    ) -> Tuple[KernelBank, TrainHistory]:
        """
        训练核组

        Args:
            manifest_train: 训练集清单
            manifest_val: 验证集清单（类别与训练集不相交）
            init_bank: 初始核组（Gabor 或随机）
            resume: 是否从 out_dir/checkpoint 恢复
            train_store / val_store: 可选的图像缓存（默认按清单惰性加载）
            on_batch: 每批挖掘完成后的回调 (batch_index, 当前核组, 三元组)

        Returns:
            (训练后的原始核组, 训练历史)；导出文件中的 kernels.txt 为零均值版本
        """
        config = self.config
        overlap = set(manifest_train.class_ids()) & set(manifest_val.class_ids())
        if overlap:
            raise ManifestError(
                f"validation classes overlap training classes: {sorted(overlap)[:5]}",
                context={"overlap": len(overlap)},
            )

        train_store = train_store or IrisImageStore(manifest_train)
        val_store = val_store or IrisImageStore(manifest_val)

        bank = init_bank
        state = OptimizerState.zeros_like(bank)
        history = TrainHistory()
        start = 0
        checkpoint_dir = self.out_dir / CHECKPOINT_DIR if self.out_dir is not None else None
        if resume and checkpoint_dir is not None and (checkpoint_dir / STATE_FILE).is_file():
            bank, state, start, history, saved = load_checkpoint(checkpoint_dir)
            if saved.get("seed") != config.seed:
                train_logger.warning(f"检查点的 seed={saved.get('seed')} 与当前配置 seed={config.seed} 不同")
            train_logger.info(f"🔁 从批次 {start} 恢复训练")

        val_triplets = self._validation_triplets(manifest_val, val_store, resume)

        batches = tqdm(
            range(start, config.total_batches),
            desc="训练",
            unit="batch",
            initial=start,
            total=config.total_batches,
            disable=not self.progress,
        )
        for batch_index in batches:
            if batch_index % config.validation_every == 0:
                history.val_loss[batch_index] = self.validation_loss(bank, val_triplets, val_store)

            began = time.perf_counter()
            net = self._net(bank)
            triplets = batch_hard_mine(
                net,
                manifest_train,
                train_store,
                config.batch_size,
                config.pool_size,
                config.seed,
                batch_index,
                config.threads,
            )
            if on_batch is not None:
                on_batch(batch_index, bank, triplets)

            grads, loss, skipped = self._batch_gradients(net, triplets, train_store)
            history.skipped_triplets += skipped
            if grads is None:
                train_logger.warning(f"批次 {batch_index} 没有可用三元组，跳过更新")
            else:
                bank, state = optimizer_step(config, bank, grads, state)
            history.train_loss.append(loss)
            history.batch_seconds.append(time.perf_counter() - began)

            if batch_index in history.val_loss:
                train_logger.info(
                    f"批次 {batch_index}: train_loss={loss:.6f}, val_loss={history.val_loss[batch_index]:.6f}"
                )
            if checkpoint_dir is not None and (batch_index + 1) % config.checkpoint_every == 0:
                save_checkpoint(checkpoint_dir, bank, state, batch_index + 1, history, config)

        history.final_val_loss = self.validation_loss(bank, val_triplets, val_store)
        train_logger.info(
            f"✅ 训练结束: {config.total_batches} 批, 最终验证损失 {history.final_val_loss:.6f}, "
            f"跳过三元组 {history.skipped_triplets}"
        )

        if self.out_dir is not None:
            save_checkpoint(checkpoint_dir, bank, state, config.total_batches, history, config)
            self.export(bank, history)
        return bank, history

    def export(self, bank: KernelBank, history: TrainHistory) -> None:
        """写出原始核组、零均值核组与训练历史"""
        save_kernels(bank, self.out_dir / "kernels_raw.txt")
        save_kernels(zero_mean(bank), self.out_dir / "kernels.txt")
        write_history(history, self.config.total_batches, self.out_dir / "history.csv")


def train(
    config: TrainConfig,
    manifest_train: DatasetManifest,
    manifest_val: DatasetManifest,
    init_bank: KernelBank,
    sampling_map: Optional[SamplingMap] = None,
    out_dir: Optional[PathLike] = None,
    resume: bool = False,
) -> Tuple[KernelBank, TrainHistory]:
    """训练入口（见 KernelTrainer.train）"""
    return KernelTrainer(config, sampling_map, out_dir).train(
        manifest_train, manifest_val, init_bank, resume=resume
    )
