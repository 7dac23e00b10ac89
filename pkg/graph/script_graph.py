"""
Script Graph - 부분 순서 스크립트 DAG 데이터 모델

이벤트는 0부터 시작하는 순번 id를 가지며, 간선 (i, j)는 v_i ≺ v_j 를 뜻한다.
저장되는 간선 집합은 항상 자신의 transitive reduction 이어야 하고,
가상 root / scenario leaf 노드는 저장하지 않고 augmented() 뷰에서만 만든다.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import islice
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from config import DURATION_BUCKETS, graph_config
from errors import CycleViolationError, InvalidArgumentError
from normalizer import normalize_label

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

ROOT = "<root>"
LEAF = "<leaf>"

# reduction 으로 고칠 수 있는 위반 (구조 위반 아님)
REPAIRABLE_CODES = frozenset({"DUP_EDGE", "NOT_REDUCED"})


@dataclass(frozen=True)
class DurationBucket:
    """이벤트 소요 시간 버킷"""
    bucket: str
    seconds_estimate: Optional[float] = None

    def __post_init__(self):
        if self.bucket not in DURATION_BUCKETS:
            raise InvalidArgumentError(f"unknown duration bucket {self.bucket!r}")
        if self.seconds_estimate is not None:
            lo, hi = DURATION_BUCKETS[self.bucket]
            s = self.seconds_estimate
            if not (s > 0 and lo <= s < hi):
                raise InvalidArgumentError(
                    f"seconds_estimate {s} outside {self.bucket} range [{lo}, {hi})"
                )

    @classmethod
    def from_seconds(cls, seconds: float) -> "DurationBucket":
        for name, (lo, hi) in DURATION_BUCKETS.items():
            if lo <= seconds < hi:
                return cls(name, float(seconds))
        raise InvalidArgumentError(f"no duration bucket covers {seconds} seconds")

    @classmethod
    def from_obj(cls, obj: Any) -> "DurationBucket":
        if isinstance(obj, str):
            return cls(obj)
        if isinstance(obj, dict):
            seconds = obj.get("seconds")
            return cls(obj.get("bucket", ""), None if seconds is None else float(seconds))
        raise InvalidArgumentError(f"duration must be a bucket name or object, got {obj!r}")

    def to_obj(self) -> Union[str, Dict[str, Any]]:
        if self.seconds_estimate is None:
            return self.bucket
        return {"bucket": self.bucket, "seconds": self.seconds_estimate}


@dataclass
class EventNode:
    """스크립트 이벤트 (v_i)"""
    id: int
    text: str
    duration: Optional[DurationBucket] = None

    @property
    def key(self) -> str:
        return normalize_label(self.text)


@dataclass
class Violation:
    code: str
    message: str
    element: Any = None

    def to_dict(self) -> Dict[str, Any]:
        element = list(self.element) if isinstance(self.element, tuple) else self.element
        return {"code": self.code, "message": self.message, "element": element}


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    @property
    def structural(self) -> List[Violation]:
        return [v for v in self.violations if v.code not in REPAIRABLE_CODES]

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


class AddEdgeResult(str, Enum):
    ADDED = "added"
    REDUNDANT = "redundant"


def _build_digraph(nodes: Iterable[int], edges: Iterable[Edge]) -> nx.DiGraph:
    dg = nx.DiGraph()
    dg.add_nodes_from(sorted(nodes))
    dg.add_edges_from(sorted(edges))
    return dg


def _raise_cycle(dg: nx.DiGraph, edge: Optional[Edge] = None) -> None:
    cycle = [(u, v) for u, v in nx.find_cycle(dg)]
    raise CycleViolationError(f"edges contain a directed cycle {cycle}", edge=edge, cycle=cycle)


def transitive_reduction(nodes: Union[int, Iterable[int]], edges: Iterable[Edge]) -> Set[Edge]:
    """비순환 간선 관계의 유일한 최소 간선 집합 (도달 가능성 동일)"""
    node_set = set(range(nodes)) if isinstance(nodes, int) else set(nodes)
    edge_set = set()
    for src, dst in edges:
        if src not in node_set or dst not in node_set:
            raise InvalidArgumentError(f"edge ({src}, {dst}) references an unknown node")
        if src == dst:
            raise CycleViolationError(f"self-loop on node {src}", edge=(src, dst), cycle=[(src, dst)])
        edge_set.add((src, dst))
    dg = _build_digraph(node_set, edge_set)
    if not nx.is_directed_acyclic_graph(dg):
        _raise_cycle(dg)
    return set(nx.transitive_reduction(dg).edges())


def is_acyclic(nodes: Union[int, Iterable[int]], edges: Iterable[Edge]) -> bool:
    node_set = range(nodes) if isinstance(nodes, int) else nodes
    return nx.is_directed_acyclic_graph(_build_digraph(node_set, edges))


@dataclass
class ScriptGraph:
    """스크립트 DAG: scenario + 이벤트 + 선후 간선"""
    scenario: str
    events: List[EventNode] = field(default_factory=list)
    edges: List[Edge] = field(default_factory=list)

    @classmethod
    def from_edges(cls, scenario: str, events: Sequence[Union[str, EventNode]],
                   edges: Iterable[Edge] = ()) -> "ScriptGraph":
        """이벤트 텍스트(또는 EventNode)와 간선으로 검증된 그래프 생성. 간선은 reduction 적용."""
        g = new_graph(scenario)
        for position, ev in enumerate(events):
            if isinstance(ev, EventNode):
                if ev.id != position:
                    raise InvalidArgumentError(f"event id {ev.id} at position {position} is not ordinal")
                g.add_event(ev.text, ev.duration)
            else:
                g.add_event(ev)
        g.edges = sorted(transitive_reduction(len(g.events), edges))
        return g

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def ids(self) -> List[int]:
        return [e.id for e in self.events]

    def event(self, node_id: int) -> EventNode:
        for e in self.events:
            if e.id == node_id:
                return e
        raise InvalidArgumentError(f"unknown event id {node_id}")

    def labels(self) -> List[Tuple[int, str]]:
        return [(e.id, e.text) for e in self.events]

    def copy(self) -> "ScriptGraph":
        return ScriptGraph(self.scenario, [replace(e) for e in self.events], list(self.edges))

    def to_networkx(self) -> nx.DiGraph:
        dg = _build_digraph(self.ids, self.edges)
        for e in self.events:
            dg.nodes[e.id]["label"] = e.text
        return dg

    # ----- 구조 변경 -----

    def add_event(self, text: str, duration: Optional[DurationBucket] = None) -> int:
        if not isinstance(text, str) or not normalize_label(text):
            raise InvalidArgumentError("event text must be non-empty")
        node_id = max(self.ids) + 1 if self.events else 0
        self.events.append(EventNode(node_id, text, duration))
        return node_id

    def add_edge(self, src: int, dst: int) -> AddEdgeResult:
        ids = set(self.ids)
        if src not in ids or dst not in ids:
            raise InvalidArgumentError(f"unknown event id in edge ({src}, {dst})")
        if src == dst:
            raise InvalidArgumentError(f"self-loop on event {src}")
        dg = self.to_networkx()
        if nx.has_path(dg, dst, src):
            path = nx.shortest_path(dg, dst, src)
            cycle = list(zip(path, path[1:])) + [(src, dst)]
            raise CycleViolationError(f"edge ({src}, {dst}) closes cycle {cycle}", edge=(src, dst), cycle=cycle)
        if nx.has_path(dg, src, dst):
            logger.debug(f"edge ({src}, {dst}) already implied, ignored")
            return AddEdgeResult.REDUNDANT
        self.edges = sorted(transitive_reduction(ids, list(self.edges) + [(src, dst)]))
        return AddEdgeResult.ADDED

    # ----- 검증 -----

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        add = report.violations.append

        if not isinstance(self.scenario, str) or not normalize_label(self.scenario):
            add(Violation("EMPTY_SCENARIO", "scenario is empty"))

        id_counts = Counter(self.ids)
        for node_id, count in sorted(id_counts.items()):
            if count > 1:
                add(Violation("DUP_ID", f"event id {node_id} declared {count} times", node_id))
        if sorted(id_counts) != list(range(len(id_counts))):
            add(Violation("BAD_ID", f"event ids {sorted(id_counts)} are not ordinal 0..n-1"))
        for e in self.events:
            if not isinstance(e.text, str) or not normalize_label(e.text):
                add(Violation("EMPTY_LABEL", f"event {e.id} has an empty label", e.id))

        sound: Set[Edge] = set()
        for edge, count in sorted(Counter(self.edges).items()):
            src, dst = edge
            if count > 1:
                add(Violation("DUP_EDGE", f"edge {edge} appears {count} times", edge))
            if src not in id_counts or dst not in id_counts:
                add(Violation("UNKNOWN_NODE", f"edge {edge} references an unknown event", edge))
            elif src == dst:
                add(Violation("SELF_LOOP", f"self-loop on event {src}", edge))
            else:
                sound.add(edge)

        dg = _build_digraph(id_counts, sound)
        if not nx.is_directed_acyclic_graph(dg):
            cycle = [(u, v) for u, v in nx.find_cycle(dg)]
            add(Violation("CYCLE", f"directed cycle {cycle}", tuple(cycle)))
        else:
            for edge in sorted(sound - set(nx.transitive_reduction(dg).edges())):
                add(Violation("NOT_REDUCED", f"edge {edge} is implied by a longer path", edge))
        return report

    @property
    def is_valid(self) -> bool:
        return self.validate().ok

    # ----- 파생 뷰 -----

    def reduced(self) -> "ScriptGraph":
        g = self.copy()
        g.edges = sorted(transitive_reduction(self.ids, self.edges))
        return g

    def transitive_closure(self) -> Set[Edge]:
        closure = nx.transitive_closure(self.to_networkx(), reflexive=None)
        return set(closure.edges())

    def topological_order(self) -> List[int]:
        dg = self.to_networkx()
        if not nx.is_directed_acyclic_graph(dg):
            _raise_cycle(dg)
        return list(nx.lexicographical_topological_sort(dg))

    def sources(self) -> List[int]:
        has_parent = {d for _, d in self.edges}
        return [i for i in self.ids if i not in has_parent]

    def sinks(self) -> List[int]:
        has_child = {s for s, _ in self.edges}
        return [i for i in self.ids if i not in has_child]

    def augmented(self) -> nx.DiGraph:
        """가상 root → source 이벤트, sink 이벤트 → scenario leaf"""
        dg = self.to_networkx()
        dg.add_node(ROOT, label=ROOT)
        dg.add_node(LEAF, label=self.scenario)
        if not self.events:
            dg.add_edge(ROOT, LEAF)
        for node_id in self.sources():
            dg.add_edge(ROOT, node_id)
        for node_id in self.sinks():
            dg.add_edge(node_id, LEAF)
        return dg

    def max_degree(self, mode: Optional[str] = None) -> int:
        """reduced 간선 기준 이벤트 노드의 최대 차수 (가상 노드 제외)"""
        mode = mode or graph_config.degree_mode
        if not self.events:
            return 0
        edges = transitive_reduction(self.ids, self.edges)
        in_deg = Counter(d for _, d in edges)
        out_deg = Counter(s for s, _ in edges)
        if mode == "in":
            return max(in_deg[i] for i in self.ids)
        if mode == "out":
            return max(out_deg[i] for i in self.ids)
        if mode == "total":
            return max(in_deg[i] + out_deg[i] for i in self.ids)
        if mode == "max-in-out":
            return max(max(in_deg[i], out_deg[i]) for i in self.ids)
        raise InvalidArgumentError(f"unknown degree mode {mode!r}")

    def linear_extensions(self, limit: int) -> List[List[int]]:
        if limit < 1:
            raise InvalidArgumentError("limit must be a positive integer")
        dg = self.to_networkx()
        if not nx.is_directed_acyclic_graph(dg):
            _raise_cycle(dg)
        if not self.events:
            return [[]]
        return [list(order) for order in islice(nx.all_topological_sorts(dg), limit)]


def new_graph(scenario: str) -> ScriptGraph:
    if not isinstance(scenario, str) or not normalize_label(scenario):
        raise InvalidArgumentError("scenario must be non-empty")
    return ScriptGraph(scenario)
