"""
Graph Edit Distance - 정확(A*) / 근사(beam) GED 및 편집 연산 분해

노드 매핑 탐색: g1 노드를 순서대로 g2 노드 또는 삭제(-1)에 할당한다.
간선 비용은 매핑으로 유도된다 (g1에만 있는 간선 E-Del, g2에만 있는 간선 E-Ins).
"""
import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from config import EDIT_KINDS, GedConfig, ged_config
from errors import InvalidArgumentError, ScriptToolkitError, SizeLimitError
from graph import LEAF, ROOT, ScriptGraph
from normalizer import normalize_label

logger = logging.getLogger(__name__)

DELETED = -1
Mapping = Tuple[int, ...]


@dataclass
class EditOp:
    """편집 연산 하나 (source: g1 요소, target: g2 요소)"""
    kind: str
    cost: float = 1.0
    source: Any = None
    target: Any = None
    old_label: Optional[str] = None
    new_label: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {"kind": self.kind, "cost": self.cost}
        for name in ("source", "target", "old_label", "new_label"):
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass
class EditScript:
    ops: List[EditOp] = field(default_factory=list)
    mapping: Dict[Any, Any] = field(default_factory=dict)

    @property
    def total_cost(self) -> float:
        return sum(op.cost for op in self.ops)

    def to_dict(self) -> Dict[str, Any]:
        return {"total_cost": self.total_cost, "ops": [op.to_dict() for op in self.ops]}


@dataclass
class _Labeled:
    names: List[Any]
    texts: List[str]
    keys: List[str]
    edges: FrozenSet[Tuple[int, int]]

    @property
    def n(self) -> int:
        return len(self.names)


def _prepare(g: ScriptGraph, cfg: GedConfig) -> _Labeled:
    events = sorted(g.events, key=lambda e: e.id)
    names: List[Any] = [e.id for e in events]
    texts = [e.text for e in events]
    edges = set(g.edges)
    if cfg.include_virtual:
        names += [ROOT, LEAF]
        texts += [ROOT, g.scenario]
        edges = set(g.augmented().edges())
    index = {name: i for i, name in enumerate(names)}
    keys = [normalize_label(t) if cfg.node_match == "normalized" else t for t in texts]
    return _Labeled(names, texts, keys, frozenset((index[s], index[d]) for s, d in edges))


def _adjacency(g: _Labeled) -> Tuple[List[List[int]], List[List[int]]]:
    out: List[List[int]] = [[] for _ in range(g.n)]
    into: List[List[int]] = [[] for _ in range(g.n)]
    for s, t in g.edges:
        out[s].append(t)
        into[t].append(s)
    return out, into


class _MappingSearch:
    """노드 할당 공간 탐색 (A* 와 beam 이 같은 비용 함수를 공유)"""

    def __init__(self, g1: _Labeled, g2: _Labeled, cfg: GedConfig):
        self.g1, self.g2 = g1, g2
        self.c = cfg.costs
        self.endpoint_rep = cfg.edge_rep_mode == "endpoint-rep"
        # e1_within[d]: 처음 d개 g1 노드 사이의 간선 수
        self.e1_within = [sum(1 for s, t in g1.edges if s < d and t < d) for d in range(g1.n + 1)]
        self.out1, self.in1 = _adjacency(g1)
        self.out2, self.in2 = _adjacency(g2)

    def _is_rep(self, u: int, v: int) -> bool:
        return v != DELETED and self.g1.keys[u] != self.g2.keys[v]

    def step_cost(self, mapping: Mapping, v: int) -> float:
        u = len(mapping)
        c, e1, e2 = self.c, self.g1.edges, self.g2.edges
        if v == DELETED:
            cost = c["V-Del"]
        else:
            cost = 0.0 if self.g1.keys[u] == self.g2.keys[v] else c["V-Rep"]
        rep_u = self._is_rep(u, v)
        for u2, v2 in enumerate(mapping):
            rep_pair = rep_u or self._is_rep(u2, v2)
            for a, b, x, y in ((u, u2, v, v2), (u2, u, v2, v)):
                has1 = (a, b) in e1
                has2 = x != DELETED and y != DELETED and (x, y) in e2
                if has1 and has2:
                    if self.endpoint_rep and rep_pair:
                        cost += c["E-Rep"]
                elif has1:
                    cost += c["E-Del"]
                elif has2:
                    cost += c["E-Ins"]
        return cost

    def completion_cost(self, mapping: Mapping) -> float:
        used = {v for v in mapping if v != DELETED}
        free = [v for v in range(self.g2.n) if v not in used]
        dangling = sum(1 for x, y in self.g2.edges if x not in used or y not in used)
        return len(free) * self.c["V-Ins"] + dangling * self.c["E-Ins"]

    def lower_bound(self, mapping: Mapping) -> float:
        """남은 노드 라벨 multiset 불일치 + 남은 간선 수 차이 (admissible)"""
        depth = len(mapping)
        used = {v for v in mapping if v != DELETED}
        rest1 = Counter(self.g1.keys[depth:])
        rest2 = Counter(k for v, k in enumerate(self.g2.keys) if v not in used)
        free_matches = sum((rest1 & rest2).values())
        a = sum(rest1.values()) - free_matches
        b = sum(rest2.values()) - free_matches
        c = self.c
        r = min(a, b)
        node_lb = min(a * c["V-Del"] + b * c["V-Ins"],
                      r * c["V-Rep"] + (a - r) * c["V-Del"] + (b - r) * c["V-Ins"])

        open1 = len(self.g1.edges) - self.e1_within[depth]
        open2 = sum(1 for x, y in self.g2.edges if x not in used or y not in used)
        edge_lb = (open1 - open2) * c["E-Del"] if open1 >= open2 else (open2 - open1) * c["E-Ins"]
        return node_lb + edge_lb

    def assignment_bound(self, mapping: Mapping) -> float:
        """남은 노드 할당 문제 (LSAP) 하한

        할당 비용 = 라벨 비용 + 이미 매핑된 노드와의 간선 불일치 (정확)
        + 남은 노드끼리 간선의 in/out 차수 차이의 절반 (간선 하나가 양 끝점에서 한 번씩 세어진다).
        """
        depth = len(mapping)
        used = {v for v in mapping if v != DELETED}
        rest = range(depth, self.g1.n)
        free = [v for v in range(self.g2.n) if v not in used]
        m, n = len(rest), len(free)
        if m == 0 and n == 0:
            return 0.0
        c, e1, e2 = self.c, self.g1.edges, self.g2.edges
        half = 0.5 * min(c["E-Del"], c["E-Ins"])
        free_set = set(free)

        out1 = [sum(1 for w in self.out1[u] if w >= depth) for u in rest]
        in1 = [sum(1 for w in self.in1[u] if w >= depth) for u in rest]
        out2 = [sum(1 for w in self.out2[v] if w in free_set) for v in free]
        in2 = [sum(1 for w in self.in2[v] if w in free_set) for v in free]

        cost = np.full((m + n, m + n), np.inf)
        cost[m:, n:] = 0.0
        for i, u in enumerate(rest):
            mapped_del = sum(1 for u2 in range(depth) if (u, u2) in e1) + \
                sum(1 for u2 in range(depth) if (u2, u) in e1)
            cost[i, n + i] = c["V-Del"] + mapped_del * c["E-Del"] + half * (out1[i] + in1[i])
            for j, v in enumerate(free):
                node = 0.0 if self.g1.keys[u] == self.g2.keys[v] else c["V-Rep"]
                edge = 0.0
                for u2, v2 in enumerate(mapping):
                    for has1, has2 in (((u, u2) in e1, v2 != DELETED and (v, v2) in e2),
                                       ((u2, u) in e1, v2 != DELETED and (v2, v) in e2)):
                        if has1 and not has2:
                            edge += c["E-Del"]
                        elif has2 and not has1:
                            edge += c["E-Ins"]
                degree = abs(out1[i] - out2[j]) + abs(in1[i] - in2[j])
                cost[i, j] = node + edge + half * degree
        for j, v in enumerate(free):
            mapped_ins = sum(1 for x in self.out2[v] if x in used) + sum(1 for x in self.in2[v] if x in used)
            cost[m + j, j] = c["V-Ins"] + mapped_ins * c["E-Ins"] + half * (out2[j] + in2[j])
        rows, cols = linear_sum_assignment(cost)
        return float(cost[rows, cols].sum())

    def astar_bound(self, mapping: Mapping) -> float:
        return max(self.lower_bound(mapping), self.assignment_bound(mapping))

    def children(self, mapping: Mapping):
        used = set(mapping)
        for v in list(range(self.g2.n)) + [DELETED]:
            if v != DELETED and v in used:
                continue
            yield v

    def astar(self) -> Tuple[float, Mapping]:
        counter = 0
        heap: List[Tuple[float, int, int, float, Mapping, bool]] = [
            (self.astar_bound(()), 0, counter, 0.0, (), False)
        ]
        while heap:
            f, _, _, g, mapping, done = heapq.heappop(heap)
            if done:
                return g, mapping
            if len(mapping) == self.g1.n:
                total = g + self.completion_cost(mapping)
                counter += 1
                heapq.heappush(heap, (total, -len(mapping) - 1, counter, total, mapping, True))
                continue
            for v in self.children(mapping):
                g2 = g + self.step_cost(mapping, v)
                child = mapping + (v,)
                counter += 1
                heapq.heappush(heap, (g2 + self.astar_bound(child), -len(child), counter, g2, child, False))
        raise ScriptToolkitError("GED search exhausted without a complete mapping")

    def beam(self, width: int) -> Tuple[float, Mapping]:
        frontier: List[Tuple[float, float, Mapping]] = [(self.lower_bound(()), 0.0, ())]
        for _ in range(self.g1.n):
            expanded = []
            for _, g, mapping in frontier:
                for v in self.children(mapping):
                    child = mapping + (v,)
                    g2 = g + self.step_cost(mapping, v)
                    expanded.append((g2 + self.lower_bound(child), g2, child))
            expanded.sort()
            frontier = expanded[:width]
        return min((g + self.completion_cost(m), m) for _, g, m in frontier)


def _edit_script(g1: _Labeled, g2: _Labeled, mapping: Mapping, cfg: GedConfig) -> EditScript:
    c = cfg.costs
    endpoint_rep = cfg.edge_rep_mode == "endpoint-rep"
    inverse = {v: u for u, v in enumerate(mapping) if v != DELETED}
    rep = [v != DELETED and g1.keys[u] != g2.keys[v] for u, v in enumerate(mapping)]
    script = EditScript(mapping={
        g1.names[u]: (None if v == DELETED else g2.names[v]) for u, v in enumerate(mapping)
    })
    ops = script.ops

    for u, v in enumerate(mapping):
        if v == DELETED:
            ops.append(EditOp("V-Del", c["V-Del"], source=g1.names[u], old_label=g1.texts[u]))
        elif rep[u]:
            ops.append(EditOp("V-Rep", c["V-Rep"], source=g1.names[u], target=g2.names[v],
                              old_label=g1.texts[u], new_label=g2.texts[v]))
    for v in range(g2.n):
        if v not in inverse:
            ops.append(EditOp("V-Ins", c["V-Ins"], target=g2.names[v], new_label=g2.texts[v]))

    for a, b in sorted(g1.edges):
        x, y = mapping[a], mapping[b]
        source = (g1.names[a], g1.names[b])
        if x != DELETED and y != DELETED and (x, y) in g2.edges:
            if endpoint_rep and (rep[a] or rep[b]):
                ops.append(EditOp("E-Rep", c["E-Rep"], source=source, target=(g2.names[x], g2.names[y])))
        else:
            ops.append(EditOp("E-Del", c["E-Del"], source=source))
    for x, y in sorted(g2.edges):
        a, b = inverse.get(x), inverse.get(y)
        if a is None or b is None or (a, b) not in g1.edges:
            ops.append(EditOp("E-Ins", c["E-Ins"], target=(g2.names[x], g2.names[y])))
    return script


def _apply(g1: _Labeled, g2: _Labeled, script: EditScript) -> bool:
    """편집 연산을 g1에 적용한 결과가 (매핑 기준으로) g2와 같은지 확인"""
    idx1 = {name: i for i, name in enumerate(g1.names)}
    idx2 = {name: i for i, name in enumerate(g2.names)}
    image = {idx1[a]: (None if b is None else idx2[b]) for a, b in script.mapping.items()}

    nodes: Dict[Any, str] = {("g1", u): g1.keys[u] for u in range(g1.n)}
    edges = {(("g1", a), ("g1", b)) for a, b in g1.edges}
    preimage = {v: ("g1", u) for u, v in image.items() if v is not None}

    def node_for(v: int):
        return preimage.get(v, ("g2", v))

    for op in script.ops:
        if op.kind == "V-Del":
            nodes.pop(("g1", idx1[op.source]))
        elif op.kind == "V-Rep":
            nodes[("g1", idx1[op.source])] = g2.keys[idx2[op.target]]
        elif op.kind == "V-Ins":
            nodes[("g2", idx2[op.target])] = g2.keys[idx2[op.target]]
        elif op.kind == "E-Del":
            edges.discard((("g1", idx1[op.source[0]]), ("g1", idx1[op.source[1]])))
        elif op.kind == "E-Ins":
            edges.add((node_for(idx2[op.target[0]]), node_for(idx2[op.target[1]])))

    if any(a not in nodes or b not in nodes for a, b in edges):
        return False

    def to_g2(node) -> int:
        side, i = node
        return image[i] if side == "g1" else i

    result_nodes = {to_g2(n): key for n, key in nodes.items()}
    result_edges = {(to_g2(a), to_g2(b)) for a, b in edges}
    return result_nodes == dict(enumerate(g2.keys)) and result_edges == set(g2.edges)


def _finish(g1: _Labeled, g2: _Labeled, cost: float, mapping: Mapping, cfg: GedConfig) -> Tuple[float, EditScript]:
    script = _edit_script(g1, g2, mapping, cfg)
    if abs(script.total_cost - cost) > 1e-9 or not _apply(g1, g2, script):
        raise ScriptToolkitError(f"edit script does not reproduce the target graph (cost {cost})")
    return cost, script


def ged(g1: ScriptGraph, g2: ScriptGraph, cfg: Optional[GedConfig] = None) -> Tuple[float, EditScript]:
    """정확 GED (A*). 노드 합계가 max_exact_nodes 를 넘으면 SizeLimitError (approximate 설정 시 beam)"""
    cfg = cfg or ged_config
    a, b = _prepare(g1, cfg), _prepare(g2, cfg)
    if a.n + b.n > cfg.max_exact_nodes:
        if not cfg.approximate:
            raise SizeLimitError(a.n + b.n, cfg.max_exact_nodes)
        logger.warning(f"{a.n + b.n} nodes exceed exact limit {cfg.max_exact_nodes}, using beam={cfg.beam}")
        return ged_approx(g1, g2, cfg, cfg.beam)
    cost, mapping = _MappingSearch(a, b, cfg).astar()
    return _finish(a, b, cost, mapping, cfg)


def ged_approx(g1: ScriptGraph, g2: ScriptGraph, cfg: Optional[GedConfig] = None,
               beam: Optional[int] = None) -> Tuple[float, EditScript]:
    """beam 제한 탐색. 반환 비용은 정확 GED 이상 (상한)"""
    cfg = cfg or ged_config
    beam = cfg.beam if beam is None else beam
    if beam < 1:
        raise InvalidArgumentError("beam must be a positive integer")
    a, b = _prepare(g1, cfg), _prepare(g2, cfg)
    cost, mapping = _MappingSearch(a, b, cfg).beam(beam)
    return _finish(a, b, cost, mapping, cfg)


def ged_breakdown(script: EditScript) -> Dict[str, int]:
    counts = {kind: 0 for kind in EDIT_KINDS}
    for op in script.ops:
        counts[op.kind] += 1
    return counts


def apply_edit_script(g1: ScriptGraph, g2: ScriptGraph, script: EditScript,
                      cfg: Optional[GedConfig] = None) -> bool:
    cfg = cfg or ged_config
    return _apply(_prepare(g1, cfg), _prepare(g2, cfg), script)


def mean_breakdown(breakdowns: Sequence[Dict[str, float]]) -> Dict[str, float]:
    if not breakdowns:
        return {kind: 0.0 for kind in EDIT_KINDS}
    return {kind: sum(b[kind] for b in breakdowns) / len(breakdowns) for kind in EDIT_KINDS}
