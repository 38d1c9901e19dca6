"""
IrisKernels Tools Package
文件格式工具：PGM、卷积核、采样点表、虹膜码、CSV 表格与报告
"""

from .code_io import load_code, save_code
from .kernel_io import export_kernel_heatmaps, load_kernels, load_sampling_map, save_kernels, save_sampling_map
from .pgm import load_iris_image, load_occlusion_mask, read_pgm, write_pgm

__all__ = [
    "read_pgm",
    "write_pgm",
    "load_iris_image",
    "load_occlusion_mask",
    "save_kernels",
    "load_kernels",
    "save_sampling_map",
    "load_sampling_map",
    "export_kernel_heatmaps",
    "save_code",
    "load_code",
]
