"""
IrisKernels Models
虹膜核学习模型包
"""

from .arrays import KernelBank, SamplingMap, as_normalized_iris, as_occlusion_mask
from .iris_models import (
    BANK_SIZE,
    CODE_LENGTH,
    DEFAULT_KERNEL_SIZES,
    IRIS_HEIGHT,
    IRIS_SHAPE,
    IRIS_WIDTH,
    POINTS_PER_MAP,
    AlignmentResult,
    DatasetManifest,
    EvalReport,
    ExcludedPair,
    EyeSide,
    GaborParams,
    HistogramBin,
    IrisCode,
    LossKind,
    ManifestEntry,
    MatchResult,
    MiningCandidate,
    OptimizerKind,
    PairKind,
    PairList,
    PairScore,
    RocPoint,
    ScoreSet,
    TrainConfig,
    TrainHistory,
    Triplet,
)

__all__ = [
    "BANK_SIZE",
    "CODE_LENGTH",
    "DEFAULT_KERNEL_SIZES",
    "IRIS_HEIGHT",
    "IRIS_SHAPE",
    "IRIS_WIDTH",
    "POINTS_PER_MAP",
    "AlignmentResult",
    "DatasetManifest",
    "EvalReport",
    "ExcludedPair",
    "EyeSide",
    "GaborParams",
    "HistogramBin",
    "IrisCode",
    "KernelBank",
    "LossKind",
    "ManifestEntry",
    "MatchResult",
    "MiningCandidate",
    "OptimizerKind",
    "PairKind",
    "PairList",
    "PairScore",
    "RocPoint",
    "SamplingMap",
    "ScoreSet",
    "TrainConfig",
    "TrainHistory",
    "Triplet",
    "as_normalized_iris",
    "as_occlusion_mask",
]
