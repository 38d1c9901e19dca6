"""
IrisKernels 单元测试
"""
