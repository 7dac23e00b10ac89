"""
Normalizer Package - 라벨 정규화/매칭
"""
from .label_mapper import LabelMapper, get_mapper, normalize_label

__all__ = ["LabelMapper", "get_mapper", "normalize_label"]
