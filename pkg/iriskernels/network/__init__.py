"""
IrisKernels Network
单卷积层、采样层与卷积核组管理
"""

from .coder import (
    binarize,
    combine_masks,
    encode_features,
    encode_features_full,
    encode_iris,
    encode_responses,
    response_maps,
    sample_mask,
    sample_patches,
)
from .conv import convolve_valid, gather_patches, response_map, sigmoid, wrap_pad
from .kernels import default_gabor_spec, gabor_init, gabor_kernel, random_init, zero_mean
from .sampling import default_sampling_map, grid_layout, shift_code

__all__ = [
    "wrap_pad",
    "convolve_valid",
    "sigmoid",
    "response_map",
    "gather_patches",
    "encode_features",
    "encode_features_full",
    "encode_responses",
    "response_maps",
    "sample_patches",
    "binarize",
    "sample_mask",
    "combine_masks",
    "encode_iris",
    "zero_mean",
    "gabor_kernel",
    "gabor_init",
    "default_gabor_spec",
    "random_init",
    "default_sampling_map",
    "grid_layout",
    "shift_code",
]
