"""
Edge Metrics - 간선 Precision / Recall / F1
"""
from dataclasses import dataclass
from typing import Dict, Optional, Set

from config import CONVENTIONS
from errors import InvalidArgumentError
from graph import Edge, ScriptGraph, transitive_reduction
from normalizer import LabelMapper


@dataclass
class PrfScore:
    """간선 P/R/F1 (0~1, 출력 시 ×100)"""
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, n_common: int, n_pred: int, n_gold: int) -> "PrfScore":
        # 양쪽 모두 간선이 없으면 완전 일치로 본다
        if n_pred == 0 and n_gold == 0:
            return cls(1.0, 1.0, 1.0)
        precision = n_common / n_pred if n_pred else 0.0
        recall = n_common / n_gold if n_gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return cls(precision, recall, f1)

    def scaled(self) -> Dict[str, float]:
        return {"f1": self.f1 * 100, "precision": self.precision * 100, "recall": self.recall * 100}


def _aligned_edges(pred: ScriptGraph, gold: ScriptGraph, match: str, strict: bool):
    if match == "label":
        mapping = LabelMapper(strict=strict).match(pred.labels(), gold.labels())
    elif match == "id":
        if sorted(pred.ids) != sorted(gold.ids):
            raise InvalidArgumentError(f"event-set mismatch: ids {sorted(pred.ids)} vs {sorted(gold.ids)}")
        mapping = {i: i for i in pred.ids}
    else:
        raise InvalidArgumentError(f"unknown event matching {match!r}")
    pred_edges: Set[Edge] = {(mapping[s], mapping[d]) for s, d in transitive_reduction(pred.ids, pred.edges)}
    gold_edges: Set[Edge] = transitive_reduction(gold.ids, gold.edges)
    return pred_edges, gold_edges


def edge_prf(pred: ScriptGraph, gold: ScriptGraph, convention: str = "standard",
             match: str = "label", strict: bool = False) -> PrfScore:
    """
    reduced 간선 집합 기준 P/R/F1.
    standard: P = |∩|/|pred|, R = |∩|/|gold|
    paper-literal: 분모를 서로 바꾼 형태 (P = |∩|/|gold|, R = |∩|/|pred|)
    """
    if convention not in CONVENTIONS:
        raise InvalidArgumentError(f"convention must be one of {list(CONVENTIONS)}, got {convention!r}")
    pred_edges, gold_edges = _aligned_edges(pred, gold, match, strict)
    n_common = len(pred_edges & gold_edges)
    if convention == "standard":
        return PrfScore.from_counts(n_common, len(pred_edges), len(gold_edges))
    return PrfScore.from_counts(n_common, len(gold_edges), len(pred_edges))


def mean_prf(scores) -> Optional[PrfScore]:
    scores = list(scores)
    if not scores:
        return None
    n = len(scores)
    return PrfScore(
        sum(s.precision for s in scores) / n,
        sum(s.recall for s in scores) / n,
        sum(s.f1 for s in scores) / n,
    )
