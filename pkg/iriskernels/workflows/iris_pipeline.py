"""
IrisKernels Pipeline
完整工作流编排：pairs → align → encode → match → eval，以及 train / compare / synth / kernels
"""

import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from ..data.alignment import align_class
from ..data.manifest import IrisImageStore, load_dataset
from ..data.pairs import generate_genuine_pairs, generate_impostor_pairs
from ..data.synthetic import SyntheticIrisGenerator
from ..evaluation.metrics import evaluate_scores
from ..matching.matcher import score_pairs
from ..models.arrays import KernelBank, SamplingMap
from ..models.iris_models import (
    DatasetManifest,
    IrisCode,
    ManifestEntry,
    PairKind,
    PairList,
    ScoreSet,
    TrainConfig,
)
from ..network.coder import encode_iris
from ..network.kernels import gabor_init, random_init, zero_mean
from ..network.sampling import default_sampling_map
from ..tools.code_io import load_code, save_code
from ..tools.kernel_io import export_kernel_heatmaps, load_kernels, load_sampling_map, save_kernels, save_sampling_map
from ..tools.pgm import save_iris_image, save_occlusion_mask
from ..tools.report_generator import ReportGenerator
from ..tools.table_io import (
    excluded_path_for,
    read_excluded,
    read_pairs,
    read_scores,
    read_table,
    write_excluded,
    write_manifest,
    write_pairs,
    write_scores,
    write_table,
)
from ..training.trainer import KernelTrainer
from ..utils.error_handler import CodeFormatError, ConfigurationError, MissingCodeError
from ..utils.logger import pipeline_logger
from ..utils.parallel import ordered_map

PathLike = Union[str, Path]

CODES_INDEX = "codes.csv"
CODES_SAMPLING_MAP = "sampling_map.txt"
ALIGNMENT_LOG = "alignment.csv"


def code_path_for(image_ref: str) -> str:
    """图像引用对应的码文件相对路径（后缀换为 .irc）"""
    return Path(image_ref).with_suffix(".irc").as_posix()


def resolve_sampling_map(path: Optional[PathLike]) -> SamplingMap:
    return load_sampling_map(path) if path is not None else default_sampling_map()


class IrisPipeline:
    """
    虹膜核学习工作流

    Args:
        threads: 线程数（不影响任何输出）
        seed: 全局随机种子
        progress: 是否显示进度条
    """

    def __init__(self, threads: int = 1, seed: int = 0, progress: bool = False):
        self.threads = threads
        self.seed = seed
        self.progress = progress
        self.report_generator = ReportGenerator()
        self.stage_times: Dict[str, float] = {}

    def _execute_stage(self, stage_name: str, stage_func: Callable[..., Dict[str, Any]], **kwargs) -> Dict[str, Any]:
        """执行单个处理阶段，记录耗时；异常交给调用方的错误边界"""
        pipeline_logger.info(f"执行阶段: {stage_name}")
        started = time.perf_counter()
        try:
            result = stage_func(**kwargs)
        except Exception as e:
            pipeline_logger.error(f"❌ {stage_name} 阶段异常: {e}")
            raise
        elapsed = time.perf_counter() - started
        self.stage_times[stage_name] = elapsed
        pipeline_logger.info(f"✅ {stage_name} 完成，耗时 {elapsed:.2f} 秒")
        return {"success": True, "stage": stage_name, **result}

    # ==================== pairs ====================

    def pairs(self, manifest_path: PathLike, out_dir: PathLike) -> Dict[str, Any]:
        return self._execute_stage("pairs", self._process_pairs, manifest_path=manifest_path, out_dir=out_dir)

    def _process_pairs(self, manifest_path: PathLike, out_dir: PathLike) -> Dict[str, Any]:
        manifest = load_dataset(manifest_path)
        out_dir = Path(out_dir)
        genuine = generate_genuine_pairs(manifest)
        impostor = generate_impostor_pairs(manifest, self.seed)
        write_pairs(genuine, out_dir / "genuine.csv")
        write_pairs(impostor, out_dir / "impostor.csv")
        return {"genuine": len(genuine), "impostor": len(impostor)}

    # ==================== align ====================

    def align(self, manifest_path: PathLike, out_dir: PathLike, mask_aware: bool = False) -> Dict[str, Any]:
        return self._execute_stage(
            "align", self._process_align, manifest_path=manifest_path, out_dir=out_dir, mask_aware=mask_aware
        )

    def _process_align(self, manifest_path: PathLike, out_dir: PathLike, mask_aware: bool) -> Dict[str, Any]:
        manifest = load_dataset(manifest_path)
        store = IrisImageStore(manifest)
        out_dir = Path(out_dir)
        groups = list(manifest.by_class().items())

        def align_one(item: Tuple[str, List[ManifestEntry]]):
            class_id, entries = item
            images = [store.image(e.image) for e in entries]
            masks = [store.mask(e.image) for e in entries]
            result, shifted_images, shifted_masks = align_class(images, masks, mask_aware=mask_aware)
            for entry, image, mask in zip(entries, shifted_images, shifted_masks):
                save_iris_image(out_dir / entry.image, image)
                save_occlusion_mask(out_dir / entry.mask, mask)
            return result

        items = tqdm(groups, desc="对齐", unit="class", disable=not self.progress)
        results = ordered_map(align_one, items, self.threads)

        rows = []
        for (class_id, entries), result in zip(groups, results):
            for entry, shift in zip(entries, result.shifts):
                rows.append([class_id, entry.image, shift])
        write_table(rows, ["class", "image", "shift"], out_dir / ALIGNMENT_LOG)
        write_manifest(manifest.entries, out_dir / "manifest.csv")
        return {"classes": len(groups), "images": len(rows)}

    # ==================== encode ====================

    def encode(
        self,
        manifest_path: PathLike,
        kernels_path: PathLike,
        out_dir: PathLike,
        sampling_map_path: Optional[PathLike] = None,
    ) -> Dict[str, Any]:
        return self._execute_stage(
            "encode",
            self._process_encode,
            manifest_path=manifest_path,
            kernels_path=kernels_path,
            out_dir=out_dir,
            sampling_map_path=sampling_map_path,
        )

    def encode_manifest(
        self, manifest: DatasetManifest, bank: KernelBank, sampling_map: SamplingMap
    ) -> Dict[str, IrisCode]:
        """在内存中编码清单中的全部图像"""
        store = IrisImageStore(manifest)

        def encode_one(entry: ManifestEntry) -> IrisCode:
            image, mask = store.get(entry.image)
            return encode_iris(image, mask, bank, sampling_map)

        items = tqdm(manifest.entries, desc="编码", unit="image", disable=not self.progress)
        codes = ordered_map(encode_one, items, self.threads)
        return {entry.image: code for entry, code in zip(manifest.entries, codes)}

    def _process_encode(
        self,
        manifest_path: PathLike,
        kernels_path: PathLike,
        out_dir: PathLike,
        sampling_map_path: Optional[PathLike],
    ) -> Dict[str, Any]:
        manifest = load_dataset(manifest_path)
        bank = load_kernels(kernels_path)
        sampling_map = resolve_sampling_map(sampling_map_path)
        out_dir = Path(out_dir)

        codes = self.encode_manifest(manifest, bank, sampling_map)
        rows = []
        for image_ref, code in codes.items():
            relative = code_path_for(image_ref)
            save_code(code, out_dir / relative)
            rows.append([image_ref, relative])
        write_table(rows, ["image", "code"], out_dir / CODES_INDEX)
        save_sampling_map(sampling_map, out_dir / CODES_SAMPLING_MAP)
        return {"codes": len(rows)}

    # ==================== match ====================

    def match(
        self,
        pairs_paths: Sequence[PathLike],
        codes_dir: PathLike,
        out_path: PathLike,
        max_shift: int = 0,
        sampling_map_path: Optional[PathLike] = None,
    ) -> Dict[str, Any]:
        return self._execute_stage(
            "match",
            self._process_match,
            pairs_paths=pairs_paths,
            codes_dir=codes_dir,
            out_path=out_path,
            max_shift=max_shift,
            sampling_map_path=sampling_map_path,
        )

    @staticmethod
    def load_codes(codes_dir: PathLike, needed: Optional[set] = None) -> Dict[str, IrisCode]:
        """按 codes.csv 索引读取码文件（needed 给出时只读取需要的）"""
        codes_dir = Path(codes_dir)
        index_path = codes_dir / CODES_INDEX
        if not index_path.is_file():
            raise MissingCodeError(f"code index not found: {index_path}", context={"path": str(index_path)})
        frame = read_table(index_path, ["image", "code"])
        codes = {}
        for row in frame.itertuples(index=False):
            if needed is not None and row.image not in needed:
                continue
            path = codes_dir / row.code
            if not path.is_file():
                raise CodeFormatError(f"code file listed in index is missing: {path}")
            codes[row.image] = load_code(path)
        return codes

    def _process_match(
        self,
        pairs_paths: Sequence[PathLike],
        codes_dir: PathLike,
        out_path: PathLike,
        max_shift: int,
        sampling_map_path: Optional[PathLike],
    ) -> Dict[str, Any]:
        pair_lists: List[PairList] = []
        for path in pairs_paths:
            pair_lists.extend(read_pairs(path))
        needed = {ref for pl in pair_lists for pair in pl.pairs for ref in pair}
        codes = self.load_codes(codes_dir, needed)

        if sampling_map_path is None and (Path(codes_dir) / CODES_SAMPLING_MAP).is_file():
            sampling_map_path = Path(codes_dir) / CODES_SAMPLING_MAP
        sampling_map = resolve_sampling_map(sampling_map_path)

        scores = score_pairs(pair_lists, codes, max_shift, sampling_map, self.threads, self.progress)
        write_scores(scores.records, out_path)
        write_excluded(scores.excluded, excluded_path_for(out_path))
        return {"scored": len(scores.records), "excluded": scores.excluded_count}

    # ==================== eval ====================

    def evaluate(self, score_paths: Sequence[PathLike], out_dir: PathLike, label: str = "") -> Dict[str, Any]:
        return self._execute_stage(
            "eval", self._process_eval, score_paths=score_paths, out_dir=out_dir, label=label
        )

    @staticmethod
    def load_score_set(score_paths: Sequence[PathLike]) -> ScoreSet:
        """读取分数文件（去重）并按 kind 拆分；排除数来自同名 .excluded.csv"""
        score_set = ScoreSet()
        seen = set()
        for path in score_paths:
            key = Path(path).resolve()
            if key in seen:
                continue
            seen.add(key)
            for record in read_scores(path):
                score_set.records.append(record)
                target = score_set.genuine if record.kind is PairKind.GENUINE else score_set.impostor
                target.append(record.distance)
            excluded = excluded_path_for(path)
            if excluded.is_file():
                score_set.excluded.extend(read_excluded(excluded))
        score_set.excluded_count = len(score_set.excluded)
        return score_set

    def _process_eval(self, score_paths: Sequence[PathLike], out_dir: PathLike, label: str) -> Dict[str, Any]:
        report = evaluate_scores(self.load_score_set(score_paths))
        self.report_generator.export(report, out_dir, label)
        return {"d_prime": report.d_prime, "eer": report.eer}

    # ==================== compare ====================

    def compare(
        self,
        manifest_path: PathLike,
        pairs_paths: Sequence[PathLike],
        kernel_paths: Sequence[PathLike],
        out_dir: PathLike,
        max_shift: int = 0,
        sampling_map_path: Optional[PathLike] = None,
    ) -> Dict[str, Any]:
        return self._execute_stage(
            "compare",
            self._process_compare,
            manifest_path=manifest_path,
            pairs_paths=pairs_paths,
            kernel_paths=kernel_paths,
            out_dir=out_dir,
            max_shift=max_shift,
            sampling_map_path=sampling_map_path,
        )

    def _process_compare(
        self,
        manifest_path: PathLike,
        pairs_paths: Sequence[PathLike],
        kernel_paths: Sequence[PathLike],
        out_dir: PathLike,
        max_shift: int,
        sampling_map_path: Optional[PathLike],
    ) -> Dict[str, Any]:
        manifest = load_dataset(manifest_path)
        sampling_map = resolve_sampling_map(sampling_map_path)
        pair_lists: List[PairList] = []
        for path in pairs_paths:
            pair_lists.extend(read_pairs(path))

        out_dir = Path(out_dir)
        reports = {}
        for kernels_path in kernel_paths:
            name = Path(kernels_path).stem
            if name in reports:
                raise ConfigurationError(f"kernel files must have distinct names, {name!r} repeats")
            codes = self.encode_manifest(manifest, load_kernels(kernels_path), sampling_map)
            scores = score_pairs(pair_lists, codes, max_shift, sampling_map, self.threads)
            report = evaluate_scores(scores)
            self.report_generator.export(report, out_dir / name, label=name)
            reports[name] = report

        self.report_generator.comparison_table(reports, out_dir / "comparison.csv")
        return {"banks": len(reports)}

    # ==================== train ====================

    def train(
        self,
        config: TrainConfig,
        train_manifest_path: PathLike,
        val_manifest_path: PathLike,
        init: str,
        out_dir: PathLike,
        init_kernels_path: Optional[PathLike] = None,
        sampling_map_path: Optional[PathLike] = None,
        resume: bool = False,
    ) -> Dict[str, Any]:
        return self._execute_stage(
            "train",
            self._process_train,
            config=config,
            train_manifest_path=train_manifest_path,
            val_manifest_path=val_manifest_path,
            init=init,
            out_dir=out_dir,
            init_kernels_path=init_kernels_path,
            sampling_map_path=sampling_map_path,
            resume=resume,
        )

    def initial_bank(self, init: str, seed: int, kernels_path: Optional[PathLike] = None) -> KernelBank:
        """按 random / gabor / file 生成初始核组"""
        if init == "random":
            return random_init(seed)
        if init == "gabor":
            return gabor_init()
        if init == "file":
            if kernels_path is None:
                raise ConfigurationError("--init file needs --init-kernels")
            return load_kernels(kernels_path)
        raise ConfigurationError(f"unknown init {init!r}; choose random, gabor or file")

    def _process_train(
        self,
        config: TrainConfig,
        train_manifest_path: PathLike,
        val_manifest_path: PathLike,
        init: str,
        out_dir: PathLike,
        init_kernels_path: Optional[PathLike],
        sampling_map_path: Optional[PathLike],
        resume: bool,
    ) -> Dict[str, Any]:
        manifest_train = load_dataset(train_manifest_path)
        manifest_val = load_dataset(val_manifest_path)
        init_bank = self.initial_bank(init, config.seed, init_kernels_path)
        out_dir = Path(out_dir)
        save_kernels(init_bank, out_dir / "kernels_init.txt")

        trainer = KernelTrainer(config, resolve_sampling_map(sampling_map_path), out_dir, self.progress)
        _, history = trainer.train(manifest_train, manifest_val, init_bank, resume=resume)
        return {
            "batches": len(history.train_loss),
            "final_val_loss": history.final_val_loss,
            "skipped_triplets": history.skipped_triplets,
        }

    # ==================== synth ====================

    def synth(self, out_dir: PathLike, classes: int, images_per_class: int) -> Dict[str, Any]:
        return self._execute_stage(
            "synth", self._process_synth, out_dir=out_dir, classes=classes, images_per_class=images_per_class
        )

    def _process_synth(self, out_dir: PathLike, classes: int, images_per_class: int) -> Dict[str, Any]:
        generator = SyntheticIrisGenerator(self.seed)
        manifest_path = generator.write_dataset(out_dir, classes, images_per_class, self.threads)
        return {"manifest": str(manifest_path), "images": classes * images_per_class}

    # ==================== kernels ====================

    def kernels(self, action: str, **kwargs) -> Dict[str, Any]:
        handlers = {
            "export-heatmaps": self._kernels_export_heatmaps,
            "zero-mean": self._kernels_zero_mean,
            "gabor-gen": self._kernels_gabor_gen,
            "random-gen": self._kernels_random_gen,
            "inspect": self._kernels_inspect,
        }
        if action not in handlers:
            raise ConfigurationError(f"unknown kernels action {action!r}")
        return self._execute_stage(f"kernels {action}", handlers[action], **kwargs)

    def _kernels_export_heatmaps(self, kernels_path: PathLike, out_dir: PathLike) -> Dict[str, Any]:
        written = export_kernel_heatmaps(load_kernels(kernels_path), out_dir)
        return {"files": len(written)}

    def _kernels_zero_mean(self, kernels_path: PathLike, out_path: PathLike) -> Dict[str, Any]:
        bank = zero_mean(load_kernels(kernels_path))
        save_kernels(bank, out_path)
        return {"sums": bank.sums()}

    def _kernels_gabor_gen(self, out_path: PathLike) -> Dict[str, Any]:
        save_kernels(gabor_init(), out_path)
        return {"path": str(out_path)}

    def _kernels_random_gen(self, out_path: PathLike) -> Dict[str, Any]:
        save_kernels(random_init(self.seed), out_path)
        return {"path": str(out_path)}

    def _kernels_inspect(self, kernels_path: PathLike) -> Dict[str, Any]:
        bank = load_kernels(kernels_path)
        summary = []
        for index, kernel in enumerate(bank.kernels):
            line = (
                f"kernel {index}: {kernel.shape[0]}x{kernel.shape[1]} sum={kernel.sum():.3e} "
                f"min={kernel.min():.6f} max={kernel.max():.6f} l2={float((kernel**2).sum()) ** 0.5:.6f}"
            )
            pipeline_logger.info(line)
            summary.append(line)
        return {"kernels": summary}

    def get_pipeline_status(self) -> Dict[str, Any]:
        """已执行阶段及耗时"""
        return {"threads": self.threads, "seed": self.seed, "stage_times": dict(self.stage_times)}


def create_pipeline(threads: int = 1, seed: int = 0, progress: bool = False) -> IrisPipeline:
    """创建工作流实例"""
    return IrisPipeline(threads=threads, seed=seed, progress=progress)
