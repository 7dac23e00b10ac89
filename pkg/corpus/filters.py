"""
Agreement Filter - 두 annotator 간선 F1 로 스크립트 채택/기각
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from config import DatasetConfig, dataset_config
from engine.metrics import PrfScore, edge_prf
from errors import InvalidArgumentError
from .base import CorpusRecord

logger = logging.getLogger(__name__)


def agreement_f1(record: CorpusRecord, convention: Optional[str] = None) -> PrfScore:
    """pred = 주 annotator, gold = 두 번째 annotator (같은 이벤트 id 위에서)"""
    alt = record.alt_graph()
    if alt is None:
        raise InvalidArgumentError(f"record {record.id!r} has no alt_edges")
    return edge_prf(record.graph(), alt, convention=convention or dataset_config.convention, match="id")


def passes_agreement(f1_percent: float, threshold: float) -> bool:
    # 부동소수 오차로 65.0 이 64.99999 가 되는 경우 방지
    return round(f1_percent, 6) >= threshold


@dataclass
class FilterResult:
    kept: List[CorpusRecord] = field(default_factory=list)
    rejected: List[Tuple[CorpusRecord, float]] = field(default_factory=list)
    # alt_edges 없이 통과한 레코드 id
    unchecked: List[str] = field(default_factory=list)

    def __iter__(self):
        return iter((self.kept, self.rejected))


def agreement_filter(records: Iterable[CorpusRecord], threshold: Optional[float] = None,
                     cfg: Optional[DatasetConfig] = None) -> FilterResult:
    cfg = cfg or dataset_config
    threshold = cfg.agreement_threshold if threshold is None else threshold
    result = FilterResult()
    for record in records:
        if record.alt_edges is None:
            logger.warning(f"record {record.id!r} has no alt_edges, kept without agreement check")
            result.kept.append(record)
            result.unchecked.append(record.id)
            continue
        f1 = agreement_f1(record, cfg.convention).f1 * 100
        if passes_agreement(f1, threshold):
            result.kept.append(record)
        else:
            logger.debug(f"record {record.id!r} rejected: agreement F1 {f1:.2f} < {threshold}")
            result.rejected.append((record, f1))
    logger.info(f"agreement filter (>= {threshold}): kept {len(result.kept)}, rejected {len(result.rejected)}")
    return result
