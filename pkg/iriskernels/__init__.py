"""
IrisKernels Package
单卷积层虹膜识别：编码、比对、评估与卷积核组训练
"""

__version__ = "0.1.0"
