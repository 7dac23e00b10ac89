"""
Corpus Stats - 코퍼스 통계 (split/source 별 개수, 이벤트 수, 차수/소요 시간/간선 수 히스토그램)
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import pandas as pd

from config import DURATION_ORDER, GraphConfig, graph_config
from .base import CorpusRecord


@dataclass
class CorpusStats:
    """레코드 단위 샤드로 나눠 계산한 뒤 merge 해도 결과가 같다"""
    n_scripts: int = 0
    n_events: int = 0
    n_edges: int = 0
    n_event_pairs: int = 0
    by_split: Counter = field(default_factory=Counter)
    by_source: Counter = field(default_factory=Counter)
    event_count_hist: Counter = field(default_factory=Counter)
    degree_hist: Counter = field(default_factory=Counter)
    edge_count_hist: Counter = field(default_factory=Counter)
    # 이벤트 단위 (버킷 없는 이벤트는 세지 않음)
    duration_hist: Counter = field(default_factory=Counter)

    def add(self, record: CorpusRecord, cfg: Optional[GraphConfig] = None) -> None:
        cfg = cfg or graph_config
        g = record.graph().reduced()
        n = g.n_events
        self.n_scripts += 1
        self.n_events += n
        self.n_edges += len(g.edges)
        self.n_event_pairs += n * (n - 1) // 2
        self.by_split[record.split] += 1
        self.by_source[record.source] += 1
        self.event_count_hist[n] += 1
        self.degree_hist[g.max_degree(cfg.degree_mode)] += 1
        self.edge_count_hist[len(g.edges)] += 1
        for e in g.events:
            if e.duration is not None:
                self.duration_hist[e.duration.bucket] += 1

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        merged = CorpusStats()
        for name in ("n_scripts", "n_events", "n_edges", "n_event_pairs"):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        for name in ("by_split", "by_source", "event_count_hist", "degree_hist",
                     "edge_count_hist", "duration_hist"):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        return merged

    @property
    def mean_events(self) -> float:
        return self.n_events / self.n_scripts if self.n_scripts else 0.0

    @property
    def mean_edges(self) -> float:
        return self.n_edges / self.n_scripts if self.n_scripts else 0.0

    def degree_histogram(self, fold_at: Optional[int] = None) -> Dict[str, int]:
        """fold_at=4 이면 4 이상은 '4+' 하나로 합친다"""
        hist: Counter = Counter()
        for degree, count in self.degree_hist.items():
            key = f"{fold_at}+" if fold_at is not None and degree >= fold_at else str(degree)
            hist[key] += count
        return dict(sorted(hist.items(), key=lambda kv: int(kv[0].rstrip("+"))))

    def degree_fractions(self, fold_at: Optional[int] = 4) -> Dict[str, float]:
        if not self.n_scripts:
            return {}
        return {k: v / self.n_scripts for k, v in self.degree_histogram(fold_at).items()}

    def duration_pairs(self) -> List[Tuple[str, int]]:
        """(bucket, count) 를 짧은 버킷부터"""
        return [(bucket, self.duration_hist.get(bucket, 0)) for bucket in DURATION_ORDER]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_scripts": self.n_scripts,
            "mean_events": round(self.mean_events, 4),
            "mean_edges": round(self.mean_edges, 4),
            "n_event_pairs": self.n_event_pairs,
            "by_split": dict(sorted(self.by_split.items())),
            "by_source": dict(sorted(self.by_source.items())),
            "event_count_hist": {str(k): v for k, v in sorted(self.event_count_hist.items())},
            "degree_hist": self.degree_histogram(),
            "degree_fractions": {k: round(v, 4) for k, v in self.degree_fractions().items()},
            "edge_count_hist": {str(k): v for k, v in sorted(self.edge_count_hist.items())},
            "duration_hist": dict(self.duration_pairs()),
        }

    def to_frame(self) -> pd.DataFrame:
        """(section, key, value) 행으로 펼친 표 (CSV 출력용)"""
        rows = []
        for name, value in self.to_dict().items():
            if isinstance(value, dict):
                rows.extend({"section": name, "key": k, "value": v} for k, v in value.items())
            else:
                rows.append({"section": "summary", "key": name, "value": value})
        return pd.DataFrame(rows, columns=["section", "key", "value"])


def corpus_stats(records: Iterable[CorpusRecord], cfg: Optional[GraphConfig] = None) -> CorpusStats:
    stats = CorpusStats()
    for record in records:
        stats.add(record, cfg)
    return stats
