"""
IrisKernels Matching
掩码加权距离与配对打分
"""

from .matcher import distance_and_count, masked_distance, match_codes, score_pairs, shift_order

__all__ = ["masked_distance", "distance_and_count", "match_codes", "score_pairs", "shift_order"]
