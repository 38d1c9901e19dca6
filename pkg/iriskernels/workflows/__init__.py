"""
IrisKernels Workflows
命令行各子命令的工作流编排
"""

from .iris_pipeline import IrisPipeline, create_pipeline

__all__ = ["IrisPipeline", "create_pipeline"]
