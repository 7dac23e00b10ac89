"""
Base Reader - 코퍼스 레코드 모델과 모든 입력 포맷 리더의 추상 베이스 클래스
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional
import logging

from config import IN_DOMAIN_SOURCES, SOURCES, SPLITS, graph_config
from errors import InvalidArgumentError, SchemaError
from graph import DurationBucket, Edge, EventNode, ScriptGraph, ValidationReport, Violation

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "scenario", "events", "edges")
OPTIONAL_FIELDS = ("source", "split", "alt_edges", "parent_id", "parent_edge")


def _parse_edges(value: Any, name: str, line_no: int) -> List[Edge]:
    if not isinstance(value, list):
        raise SchemaError(f"{name} must be a list of [src, dst] pairs", line_no)
    edges: List[Edge] = []
    for pair in value:
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)):
            raise SchemaError(f"{name} entry {pair!r} is not an integer pair", line_no)
        edges.append((pair[0], pair[1]))
    return edges


def _parse_events(value: Any, line_no: int) -> List[EventNode]:
    if not isinstance(value, list):
        raise SchemaError("events must be a list", line_no)
    events: List[EventNode] = []
    for position, item in enumerate(value):
        if isinstance(item, str):
            events.append(EventNode(position, item))
            continue
        if not isinstance(item, dict) or "text" not in item or not isinstance(item["text"], str):
            raise SchemaError(f"event {position} must be a string or an object with 'text'", line_no)
        extra = set(item) - {"id", "text", "duration"}
        if extra:
            raise SchemaError(f"event {position} has unknown fields", line_no, extra=extra)
        node_id = item.get("id", position)
        if not isinstance(node_id, int) or isinstance(node_id, bool):
            raise SchemaError(f"event {position} id must be an integer", line_no)
        duration = None
        if item.get("duration") is not None:
            try:
                duration = DurationBucket.from_obj(item["duration"])
            except InvalidArgumentError as e:
                raise SchemaError(f"event {position}: {e}", line_no)
        events.append(EventNode(node_id, item["text"], duration))
    return events


@dataclass
class CorpusRecord:
    """크라우드소싱 스크립트 한 건 (주 annotator 간선 + 선택적 두 번째 annotator 간선)"""
    id: str
    scenario: str
    events: List[EventNode]
    edges: List[Edge]
    source: str = "other"
    split: str = "train"
    alt_edges: Optional[List[Edge]] = None
    parent_id: Optional[str] = None
    parent_edge: Optional[Edge] = None
    line_no: int = field(default=0, compare=False)

    @property
    def domain(self) -> str:
        return "in-domain" if self.source in IN_DOMAIN_SOURCES else "out-of-domain"

    @property
    def n_events(self) -> int:
        return len(self.events)

    def graph(self) -> ScriptGraph:
        return ScriptGraph(self.scenario, [EventNode(e.id, e.text, e.duration) for e in self.events],
                           list(self.edges))

    def alt_graph(self) -> Optional[ScriptGraph]:
        if self.alt_edges is None:
            return None
        g = self.graph()
        g.edges = list(self.alt_edges)
        return g

    def validate(self) -> Dict[str, ValidationReport]:
        reports = {"edges": self.graph().validate()}
        alt = self.alt_graph()
        if alt is not None:
            reports["alt_edges"] = alt.validate()
        return reports

    def structural_violations(self) -> List[Violation]:
        found: List[Violation] = []
        for name, report in self.validate().items():
            for v in report.structural:
                found.append(Violation(v.code, f"{name}: {v.message}", v.element))
        return found

    @classmethod
    def from_dict(cls, obj: Any, line_no: int = 0) -> "CorpusRecord":
        if not isinstance(obj, dict):
            raise SchemaError("record must be a JSON object", line_no)
        missing = [k for k in REQUIRED_FIELDS if k not in obj]
        extra = [k for k in obj if k not in REQUIRED_FIELDS + OPTIONAL_FIELDS]
        if missing or extra:
            raise SchemaError("schema violation", line_no, missing=missing, extra=extra)

        record_id = obj["id"]
        if isinstance(record_id, bool) or not isinstance(record_id, (str, int)):
            raise SchemaError("id must be a string", line_no)
        if not isinstance(obj["scenario"], str):
            raise SchemaError("scenario must be a string", line_no)
        source = obj.get("source", "other")
        split = obj.get("split", "train")
        if source not in SOURCES:
            raise SchemaError(f"source must be one of {SOURCES}, got {source!r}", line_no)
        if split not in SPLITS:
            raise SchemaError(f"split must be one of {SPLITS}, got {split!r}", line_no)
        alt_edges = obj.get("alt_edges")
        parent_edge = obj.get("parent_edge")
        parent_id = obj.get("parent_id")
        if parent_id is not None and not isinstance(parent_id, (str, int)):
            raise SchemaError("parent_id must be a string", line_no)

        return cls(
            id=str(record_id),
            scenario=obj["scenario"],
            events=_parse_events(obj["events"], line_no),
            edges=_parse_edges(obj["edges"], "edges", line_no),
            source=source,
            split=split,
            alt_edges=None if alt_edges is None else _parse_edges(alt_edges, "alt_edges", line_no),
            parent_id=None if parent_id is None else str(parent_id),
            parent_edge=None if parent_edge is None else _parse_edges([parent_edge], "parent_edge", line_no)[0],
            line_no=line_no,
        )

    def to_dict(self) -> Dict[str, Any]:
        events = []
        for e in self.events:
            item: Dict[str, Any] = {"id": e.id, "text": e.text}
            if e.duration is not None:
                item["duration"] = e.duration.to_obj()
            events.append(item)
        out: Dict[str, Any] = {
            "id": self.id,
            "scenario": self.scenario,
            "source": self.source,
            "split": self.split,
            "events": events,
            "edges": [list(e) for e in self.edges],
        }
        if self.alt_edges is not None:
            out["alt_edges"] = [list(e) for e in self.alt_edges]
        if self.parent_id is not None:
            out["parent_id"] = self.parent_id
        if self.parent_edge is not None:
            out["parent_edge"] = list(self.parent_edge)
        return out

    @classmethod
    def from_graph(cls, record_id: str, g: ScriptGraph, source: str = "other", split: str = "test",
                   alt_edges: Optional[List[Edge]] = None) -> "CorpusRecord":
        return cls(record_id, g.scenario, [EventNode(e.id, e.text, e.duration) for e in g.events],
                   list(g.edges), source=source, split=split, alt_edges=alt_edges)


@dataclass
class QuarantinedRecord:
    """구조 검증/파싱 실패로 격리된 레코드"""
    line_no: int
    record_id: Optional[str]
    violations: List[Violation]

    def to_dict(self) -> Dict[str, Any]:
        return {"line": self.line_no, "id": self.record_id,
                "violations": [v.to_dict() for v in self.violations]}


@dataclass
class Corpus:
    records: List[CorpusRecord] = field(default_factory=list)
    quarantined: List[QuarantinedRecord] = field(default_factory=list)
    # DOT 입력의 레코드별 복구 경고 (id → 메시지 목록)
    warnings: Dict[str, List[str]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[CorpusRecord]:
        return iter(self.records)

    def by_id(self) -> Dict[str, List[CorpusRecord]]:
        grouped: Dict[str, List[CorpusRecord]] = {}
        for r in self.records:
            grouped.setdefault(r.id, []).append(r)
        return grouped


class BaseReader(ABC):
    FORMAT_NAME: str = "base"

    def __init__(self, strict: bool = True):
        self.strict = strict

    @abstractmethod
    def read(self, path: str) -> Corpus:
        pass

    def _admit(self, corpus: Corpus, record: CorpusRecord) -> None:
        """구조 위반 레코드는 격리, 나머지는 이벤트 수 경고 후 채택"""
        violations = record.structural_violations()
        if violations:
            logger.warning(f"{self.FORMAT_NAME} record {record.id!r} (line {record.line_no}) quarantined: "
                           f"{sorted({v.code for v in violations})}")
            corpus.quarantined.append(QuarantinedRecord(record.line_no, record.id, violations))
            return
        n = record.n_events
        if not graph_config.min_events_warn <= n <= graph_config.max_events_warn:
            logger.warning(f"record {record.id!r} has {n} events (expected "
                           f"{graph_config.min_events_warn}-{graph_config.max_events_warn})")
        corpus.records.append(record)

    def _reject(self, corpus: Corpus, line_no: int, record_id: Optional[str], code: str, message: str) -> None:
        logger.warning(f"{self.FORMAT_NAME} line {line_no}: {message}")
        corpus.quarantined.append(QuarantinedRecord(line_no, record_id, [Violation(code, message)]))

