"""
Label Mapper - 이벤트 라벨 정규화 및 예측/정답 이벤트 매칭
"""
import logging
import re
from collections import defaultdict, deque
from typing import Deque, Dict, List, Sequence, Tuple

from errors import InvalidArgumentError

logger = logging.getLogger(__name__)

_WHITESPACE = re.compile(r"\s+")


def normalize_label(text: str) -> str:
    """
    라벨 비교용 정규화: 소문자, 양끝 공백 제거, 내부 공백 축약
    예: "  Gather  the\tEggs " → "gather the eggs"
    """
    return _WHITESPACE.sub(" ", text.strip()).lower()


class LabelMapper:
    """예측 스크립트와 정답 스크립트 사이의 이벤트 매핑"""

    def __init__(self, strict: bool = False):
        self.strict = strict

    @staticmethod
    def _index(labels: Sequence[Tuple[int, str]]) -> Dict[str, Deque[int]]:
        index: Dict[str, Deque[int]] = defaultdict(deque)
        for node_id, text in sorted(labels):
            index[normalize_label(text)].append(node_id)
        return index

    def match(self, pred: Sequence[Tuple[int, str]], gold: Sequence[Tuple[int, str]]) -> Dict[int, int]:
        """
        (id, text) 목록 두 개를 정규화 라벨 기준 전단사로 매핑 (pred id → gold id).
        중복 라벨은 id 순서대로 그리디 매칭, strict 모드에서는 중복 자체가 오류.
        """
        if len(pred) != len(gold):
            raise InvalidArgumentError(
                f"event-set mismatch: {len(pred)} predicted vs {len(gold)} gold events"
            )
        pred_index = self._index(pred)
        gold_index = self._index(gold)

        if set(pred_index) != set(gold_index):
            missing = sorted(set(gold_index) - set(pred_index))
            extra = sorted(set(pred_index) - set(gold_index))
            raise InvalidArgumentError(f"event-set mismatch: missing {missing}, unexpected {extra}")

        mapping: Dict[int, int] = {}
        for label, pred_ids in pred_index.items():
            gold_ids = gold_index[label]
            if len(pred_ids) != len(gold_ids):
                raise InvalidArgumentError(
                    f"event-set mismatch: label {label!r} occurs {len(pred_ids)}x vs {len(gold_ids)}x"
                )
            if len(pred_ids) > 1:
                if self.strict:
                    raise InvalidArgumentError(f"ambiguous duplicate label {label!r}")
                logger.debug(f"duplicate label {label!r} matched greedily in id order")
            for p_id, g_id in zip(pred_ids, gold_ids):
                mapping[p_id] = g_id
        return mapping

    def remap_edges(self, edges, mapping: Dict[int, int]) -> List[Tuple[int, int]]:
        return sorted((mapping[s], mapping[d]) for s, d in edges)


def get_mapper(strict: bool = False) -> LabelMapper:
    return LabelMapper(strict=strict)
