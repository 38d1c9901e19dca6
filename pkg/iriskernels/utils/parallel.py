"""
IrisKernels Parallel Helpers
按输入顺序返回结果的线程池映射
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    并行映射，结果顺序与输入一致

    Args:
        fn: 作用于每个元素的函数
        items: 输入序列
        threads: 线程数（<=1 时串行执行）

    Returns:
        List[R]: 与输入同序的结果列表
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
