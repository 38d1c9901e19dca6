"""
IrisKernels Data
数据集清单、比对列表、类内对齐与合成数据
"""

from .alignment import align_class, pearson_cc, shift_columns, shift_correlations
from .manifest import IrisImageStore, load_dataset
from .pairs import generate_genuine_pairs, generate_impostor_pairs
from .synthetic import SyntheticIrisConfig, SyntheticIrisGenerator

__all__ = [
    "load_dataset",
    "IrisImageStore",
    "generate_genuine_pairs",
    "generate_impostor_pairs",
    "pearson_cc",
    "align_class",
    "shift_columns",
    "shift_correlations",
    "SyntheticIrisConfig",
    "SyntheticIrisGenerator",
]
