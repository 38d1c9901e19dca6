"""
IrisKernels Structured Models
虹膜核学习结构化数据模型
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# ==================== 数据契约常量 ====================

IRIS_HEIGHT = 64
IRIS_WIDTH = 512
IRIS_SHAPE = (IRIS_HEIGHT, IRIS_WIDTH)
BANK_SIZE = 6
POINTS_PER_MAP = 256
CODE_LENGTH = BANK_SIZE * POINTS_PER_MAP
DEFAULT_KERNEL_SIZES: Tuple[Tuple[int, int], ...] = (
    (9, 15),
    (9, 15),
    (9, 27),
    (9, 27),
    (9, 51),
    (9, 51),
)


class EyeSide(str, Enum):
    """眼别"""

    LEFT = "left"
    RIGHT = "right"
    UNKNOWN = "unknown"


class PairKind(str, Enum):
    """比对类型"""

    GENUINE = "genuine"
    IMPOSTOR = "impostor"


# ==================== iris-data ====================


class ManifestEntry(BaseModel):
    """清单条目：一幅归一化虹膜图像及其遮挡掩码"""

    model_config = ConfigDict(frozen=True)

    class_id: str = Field(description="类别标识（一只眼睛）")
    eye_side: EyeSide = Field(default=EyeSide.UNKNOWN, description="眼别")
    image: str = Field(description="图像引用（相对清单目录的路径）")
    mask: str = Field(description="掩码引用（相对清单目录的路径）")

    @field_validator("class_id", "image", "mask")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value or not value.strip():
            raise ValueError("must be a nonempty string")
        return value.strip()


class DatasetManifest(BaseModel):
    """数据集清单：按 class_id、图像路径排序的条目列表"""

    model_config = ConfigDict(frozen=True)

    root: str = Field(default=".", description="图像路径的基准目录")
    entries: List[ManifestEntry] = Field(default_factory=list, description="排序后的条目")

    @model_validator(mode="after")
    def _check_sides(self) -> "DatasetManifest":
        sides: Dict[str, EyeSide] = {}
        for entry in self.entries:
            known = sides.setdefault(entry.class_id, entry.eye_side)
            if known != entry.eye_side:
                raise ValueError(
                    f"class {entry.class_id!r} mixes eye sides {known.value} and {entry.eye_side.value}"
                )
        return self

    def class_ids(self) -> List[str]:
        """按排序返回全部类别"""
        return sorted({entry.class_id for entry in self.entries})

    def by_class(self) -> Dict[str, List[ManifestEntry]]:
        """类别 -> 条目列表（保持清单顺序）"""
        groups: Dict[str, List[ManifestEntry]] = {}
        for entry in self.entries:
            groups.setdefault(entry.class_id, []).append(entry)
        return {cid: groups[cid] for cid in sorted(groups)}

    def side_of(self, class_id: str) -> EyeSide:
        """某一类别的眼别"""
        for entry in self.entries:
            if entry.class_id == class_id:
                return entry.eye_side
        raise KeyError(class_id)

    def entry_for(self, image_ref: str) -> ManifestEntry:
        """按图像引用查找条目"""
        for entry in self.entries:
            if entry.image == image_ref:
                return entry
        raise KeyError(image_ref)

    def subset(self, class_ids) -> "DatasetManifest":
        """只保留给定类别的子清单"""
        keep = set(class_ids)
        return DatasetManifest(
            root=self.root, entries=[e for e in self.entries if e.class_id in keep]
        )


class PairList(BaseModel):
    """真/假配对列表"""

    kind: PairKind = Field(description="配对类型")
    pairs: List[Tuple[str, str]] = Field(default_factory=list, description="(image_a, image_b)")

    def __len__(self) -> int:
        return len(self.pairs)


class AlignmentResult(BaseModel):
    """类内对齐结果"""

    reference_index: int = Field(ge=0, description="参考图像下标")
    shifts: List[int] = Field(description="每幅图像的循环列平移量 [0, width)")

    @model_validator(mode="after")
    def _reference_unshifted(self) -> "AlignmentResult":
        if self.reference_index >= len(self.shifts):
            raise ValueError("reference_index out of range")
        if self.shifts[self.reference_index] != 0:
            raise ValueError("reference image must have shift 0")
        return self


# ==================== coder / matcher ====================


class IrisCode(BaseModel):
    """二值虹膜码及其掩码位"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray = Field(description="码位 (bool)")
    mask_bits: np.ndarray = Field(description="掩码位 (bool)")

    @model_validator(mode="after")
    def _check_lengths(self) -> "IrisCode":
        if self.bits.ndim != 1 or self.bits.shape != self.mask_bits.shape:
            raise ValueError("bits and mask_bits must be 1-D arrays of equal length")
        if self.bits.dtype != bool or self.mask_bits.dtype != bool:
            raise ValueError("bits and mask_bits must be boolean arrays")
        return self


class MatchResult(BaseModel):
    """一次比对的结果"""

    distance: float = Field(ge=0.0, le=1.0, description="掩码加权分数距离")
    valid_bits: int = Field(gt=0, description="两掩码共同有效的位数")
    shift_used: int = Field(default=0, description="采用的列平移（采样列为单位）")


class PairScore(BaseModel):
    """带配对信息的分数"""

    path_a: str
    path_b: str
    kind: PairKind
    distance: float = Field(ge=0.0, le=1.0)
    valid_bits: int = Field(gt=0)
    shift: int = 0


class ExcludedPair(BaseModel):
    """被排除（无法打分）的配对"""

    path_a: str
    path_b: str
    kind: PairKind
    reason: str


class ScoreSet(BaseModel):
    """真/假分数分布"""

    genuine: List[float] = Field(default_factory=list)
    impostor: List[float] = Field(default_factory=list)
    excluded_count: int = Field(default=0, ge=0)
    records: List[PairScore] = Field(default_factory=list, description="按输入顺序的打分记录")
    excluded: List[ExcludedPair] = Field(default_factory=list)

    @field_validator("genuine", "impostor")
    @classmethod
    def _in_unit_range(cls, values: List[float]) -> List[float]:
        for v in values:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"score {v} outside [0, 1]")
        return values


# ==================== eval ====================


class RocPoint(BaseModel):
    """ROC 点"""

    fmr: float = Field(ge=0.0, le=1.0)
    fnmr: float = Field(ge=0.0, le=1.0)
    threshold: float


class HistogramBin(BaseModel):
    """直方图区间"""

    bin_lo: float
    bin_hi: float
    count: int = Field(ge=0)


class EvalReport(BaseModel):
    """评估报告"""

    d_prime: float = Field(ge=0.0, description="可分性 d′（完全分离时为 +inf）")
    eer: float = Field(ge=0.0, le=1.0)
    roc: List[RocPoint] = Field(default_factory=list)
    hist_genuine: List[HistogramBin] = Field(default_factory=list)
    hist_impostor: List[HistogramBin] = Field(default_factory=list)
    genuine_count: int = Field(ge=0)
    impostor_count: int = Field(ge=0)
    excluded_count: int = Field(default=0, ge=0)

    @property
    def perfect_separation(self) -> bool:
        return math.isinf(self.d_prime)


# ==================== trainer ====================


class LossKind(str, Enum):
    """损失函数"""

    SOFT_MARGIN = "soft_margin"
    HINGE = "hinge"


class OptimizerKind(str, Enum):
    """优化器"""

    ADAM = "adam"
    SGD_MOMENTUM = "sgd_momentum"


class TrainConfig(BaseModel):
    """训练配置"""

    model_config = ConfigDict(use_enum_values=False)

    batch_size: int = Field(default=64, ge=2, description="每批类别数 X")
    mining_pool_size: Optional[int] = Field(default=None, ge=1, description="候选负样本类别数")
    total_batches: int = Field(default=20000, ge=0)
    validation_triplets: int = Field(default=2048, ge=1)
    validation_every: int = Field(default=250, ge=1, description="每 V 批评估一次验证损失")
    checkpoint_every: int = Field(default=1000, ge=1)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = Field(default=1e-3, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(default=1e-8, gt=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    loss: LossKind = LossKind.SOFT_MARGIN
    margin: float = Field(default=0.3, ge=0.0, description="hinge 损失的 α")
    threads: int = Field(default=1, ge=1)

    @property
    def pool_size(self) -> int:
        return self.mining_pool_size if self.mining_pool_size is not None else self.batch_size


class MiningCandidate(BaseModel):
    """难负样本挖掘中的一个候选"""

    image: str
    class_id: str
    d_an: Optional[float] = Field(default=None, description="None 表示组合掩码为空而被跳过")


class Triplet(BaseModel):
    """训练三元组（锚点/正样本/负样本）及组合采样掩码"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    anchor: str
    positive: str
    negative: str
    anchor_class: str
    negative_class: str
    ap_mask: np.ndarray = Field(description="sample_mask(combine(anchor, positive))")
    an_mask: np.ndarray = Field(description="sample_mask(combine(anchor, negative))")
    candidates: List[MiningCandidate] = Field(default_factory=list, description="挖掘候选记录")

    @model_validator(mode="after")
    def _check_roles(self) -> "Triplet":
        if self.anchor == self.positive:
            raise ValueError("anchor and positive must be different images")
        if self.anchor_class == self.negative_class:
            raise ValueError("negative must come from a different class")
        return self

    @property
    def is_degenerate(self) -> bool:
        return not (bool(self.ap_mask.any()) and bool(self.an_mask.any()))


class TrainHistory(BaseModel):
    """训练历史"""

    train_loss: List[float] = Field(default_factory=list, description="每批训练损失")
    val_loss: Dict[int, float] = Field(default_factory=dict, description="批次号 -> 验证损失")
    batch_seconds: List[float] = Field(default_factory=list, description="每批耗时")
    skipped_triplets: int = Field(default=0, ge=0)
    final_val_loss: Optional[float] = None


class GaborParams(BaseModel):
    """单个 Gabor 核的参数"""

    rows: int = Field(gt=0)
    cols: int = Field(gt=0)
    wavelength: float = Field(gt=0.0, description="波长 λ（像素）")
    orientation: float = Field(default=0.0, description="方向 θ（弧度）")
    sigma_x: float = Field(gt=0.0)
    sigma_y: float = Field(gt=0.0)
    phase: float = Field(default=0.0, description="相位 φ（弧度）")
