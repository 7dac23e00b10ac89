"""
Pairwise Aggregation - 쌍별 선후 확률 → 부분 순서 스크립트

p[i][j] = p(v_i ≺ v_j) 를 가중치 인접 행렬로 만들고, 사이클이 남아 있으면
사이클 안의 최소 가중치 간선을 하나씩 제거한 뒤 transitive reduction 을 적용한다.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from config import AggregationConfig, aggregation_config
from errors import CycleViolationError, InvalidArgumentError
from graph import EventNode, ScriptGraph

logger = logging.getLogger(__name__)

WeightedEdge = Tuple[int, int, float]


@dataclass
class PairwiseScores:
    """n×n 선후 확률 행렬 (대각 성분은 무시)"""
    n: int
    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.n < 0 or self.p.shape != (self.n, self.n):
            raise InvalidArgumentError(f"score matrix must be {self.n}x{self.n}, got shape {self.p.shape}")
        off_diag = ~np.eye(self.n, dtype=bool)
        values = self.p[off_diag]
        if np.isnan(values).any() or (values < 0).any() or (values > 1).any():
            raise InvalidArgumentError("pairwise probabilities must lie in [0, 1]")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "PairwiseScores":
        try:
            matrix = np.asarray(rows, dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidArgumentError(f"malformed score matrix: {e}")
        n = matrix.shape[0] if matrix.ndim == 2 else -1
        if matrix.size == 0:
            matrix, n = np.zeros((0, 0)), 0
        return cls(n, matrix)

    def check_complementary(self, epsilon: float) -> None:
        """strict 모드: |p[i][j] + p[j][i] - 1| <= epsilon"""
        sums = self.p + self.p.T
        off_diag = ~np.eye(self.n, dtype=bool)
        bad = np.argwhere(off_diag & (np.abs(sums - 1.0) > epsilon))
        if len(bad):
            i, j = (int(x) for x in bad[0])
            raise InvalidArgumentError(f"p[{i}][{j}] + p[{j}][{i}] = {sums[i, j]:.6f} is not 1")


@dataclass
class WeightedDigraph:
    """가중치 방향 그래프 (순서쌍당 간선 최대 1개, self-loop 없음)"""
    n: int
    weights: Dict[Tuple[int, int], float] = field(default_factory=dict)
    removed: List[WeightedEdge] = field(default_factory=list)

    def add_edge(self, src: int, dst: int, weight: float) -> None:
        if src == dst:
            raise InvalidArgumentError(f"self-loop on node {src}")
        if not (0 <= src < self.n and 0 <= dst < self.n):
            raise InvalidArgumentError(f"edge ({src}, {dst}) outside {self.n} nodes")
        if not 0.0 <= weight <= 1.0:
            raise InvalidArgumentError(f"edge weight {weight} outside [0, 1]")
        self.weights[(src, dst)] = float(weight)

    @property
    def edges(self) -> List[WeightedEdge]:
        return [(s, d, w) for (s, d), w in sorted(self.weights.items())]

    def to_networkx(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(range(self.n))
        for s, d, w in self.edges:
            dg.add_edge(s, d, weight=w)
        return dg

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())

    def find_cycle(self) -> Optional[List[Tuple[int, int]]]:
        """가장 작은 id 부터의 결정적 DFS 로 사이클 하나"""
        try:
            return [(u, v) for u, v in nx.find_cycle(self.to_networkx())]
        except nx.NetworkXNoCycle:
            return None

    def copy(self) -> "WeightedDigraph":
        return WeightedDigraph(self.n, dict(self.weights), list(self.removed))


def build_adjacency(scores: PairwiseScores, cfg: Optional[AggregationConfig] = None) -> WeightedDigraph:
    """
    argmax-pair: 각 쌍에서 확률이 큰 방향 하나 (동률이면 작은 id → 큰 id), 두 방향 모두 0 인 쌍만 제외
    threshold: p[i][j] >= tau 인 모든 (i, j)
    """
    cfg = cfg or aggregation_config
    if cfg.strict:
        scores.check_complementary(cfg.epsilon)
    p = scores.p
    wd = WeightedDigraph(scores.n)
    for i in range(scores.n):
        for j in range(i + 1, scores.n):
            if cfg.edge_policy == "threshold":
                if p[i, j] >= cfg.tau:
                    wd.add_edge(i, j, p[i, j])
                if p[j, i] >= cfg.tau:
                    wd.add_edge(j, i, p[j, i])
                continue
            src, dst = (i, j) if p[i, j] >= p[j, i] else (j, i)
            if p[src, dst] > 0.0:
                wd.add_edge(src, dst, p[src, dst])
    return wd


def break_cycles(wd: WeightedDigraph) -> WeightedDigraph:
    """사이클이 없어질 때까지 찾은 사이클의 최소 가중치 간선 제거 (동률은 (src, dst) 사전순 최소)"""
    result = wd.copy()
    while True:
        cycle = result.find_cycle()
        if cycle is None:
            break
        src, dst = min(cycle, key=lambda e: (result.weights[e], e))
        weight = result.weights.pop((src, dst))
        result.removed.append((src, dst, weight))
        logger.debug(f"removed edge ({src}, {dst}) w={weight:.4f} from cycle {cycle}")
    if result.removed:
        logger.info(f"break_cycles removed {len(result.removed)} edge(s)")
    return result


def _as_events(events: Sequence[Union[str, EventNode]]) -> List[Union[str, EventNode]]:
    out: List[Union[str, EventNode]] = []
    for position, ev in enumerate(events):
        if isinstance(ev, EventNode):
            out.append(EventNode(position, ev.text, ev.duration))
        else:
            out.append(ev)
    return out


def to_script(wd: WeightedDigraph, events: Sequence[Union[str, EventNode]], scenario: str) -> ScriptGraph:
    if len(events) != wd.n:
        raise InvalidArgumentError(f"{len(events)} events for a {wd.n}-node digraph")
    if not wd.is_acyclic():
        raise CycleViolationError("weighted digraph still contains a cycle", cycle=wd.find_cycle())
    g = ScriptGraph.from_edges(scenario, _as_events(events), [(s, d) for s, d, _ in wd.edges])
    return g


def predict_edges(events: Sequence[Union[str, EventNode]], scores: PairwiseScores, scenario: str,
                  cfg: Optional[AggregationConfig] = None) -> ScriptGraph:
    if len(events) != scores.n:
        raise InvalidArgumentError(f"{len(events)} events but a {scores.n}x{scores.n} score matrix")
    return to_script(break_cycles(build_adjacency(scores, cfg)), events, scenario)


def oracle_scores(g: ScriptGraph) -> PairwiseScores:
    """정답 스크립트의 transitive closure 로 만든 점수 (closure 쌍 1, 나머지 0)"""
    n = g.n_events
    p = np.zeros((n, n))
    for i, j in g.transitive_closure():
        p[i, j] = 1.0
    return PairwiseScores(n, p)

