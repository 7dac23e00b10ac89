"""
Random Baselines - 무작위 스크립트 기준선과 annotator 간 일치도 행
"""
import logging
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from config import RANDOM_POLICIES, GedConfig, baseline_config, ged_config
from errors import InvalidArgumentError
from graph import Edge, EventNode, ScriptGraph
from corpus.base import CorpusRecord
from .report import EvalPair, EvalReport, corpus_report

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RandomPolicy:
    kind: str = "random-chain"
    seed: int = 0
    p_branch: float = 0.3

    def __post_init__(self):
        if self.kind not in RANDOM_POLICIES:
            raise InvalidArgumentError(f"policy must be one of {list(RANDOM_POLICIES)}, got {self.kind!r}")
        if not 0.0 <= self.p_branch <= 1.0:
            raise InvalidArgumentError(f"p_branch must lie in [0, 1], got {self.p_branch}")
        if not 0 <= self.seed <= SEED_MASK:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def from_config(cls, seed: Optional[int] = None) -> "RandomPolicy":
        cfg = baseline_config
        return cls(cfg.policy, cfg.seed if seed is None else seed, cfg.p_branch)

    def for_record(self, index: int) -> "RandomPolicy":
        """레코드별 파생 seed (seed XOR index)"""
        return replace(self, seed=(self.seed ^ index) & SEED_MASK)

    @property
    def name(self) -> str:
        if self.kind == "random-dag":
            return f"random-dag(p_branch={self.p_branch:g})"
        return self.kind


def _random_edges(n: int, policy: RandomPolicy) -> List[Edge]:
    rng = np.random.default_rng(policy.seed)
    order = [int(x) for x in rng.permutation(n)]
    if policy.kind == "random-chain":
        return list(zip(order, order[1:]))
    edges: List[Edge] = []
    for position in range(1, n):
        node = order[position]
        parents = {order[int(rng.integers(position))]}
        # 앞선 노드가 둘 이상일 때만 두 번째 부모 가능
        if position > 1 and rng.random() < policy.p_branch:
            others = [p for p in order[:position] if p not in parents]
            parents.add(others[int(rng.integers(len(others)))])
        edges.extend((p, node) for p in sorted(parents))
    return edges


def random_script(events: Sequence[Union[str, EventNode]], policy: Optional[RandomPolicy] = None,
                  scenario: str = "random script") -> ScriptGraph:
    """같은 seed 면 같은 그래프. 결과는 reduction 된 유효 스크립트."""
    policy = policy or RandomPolicy.from_config()
    if not events:
        raise InvalidArgumentError("random_script needs at least one event")
    return ScriptGraph.from_edges(scenario, list(events), _random_edges(len(events), policy))


def baseline_ged_config(include_virtual: bool = True) -> GedConfig:
    """기준선 GED: root/leaf 를 포함한 스크립트 그래프, 정확 한계를 넘으면 beam"""
    return replace(ged_config, approximate=True, include_virtual=include_virtual)


def _baseline_ged_config(ged_cfg: Optional[GedConfig]) -> GedConfig:
    return ged_cfg if ged_cfg is not None else baseline_ged_config()


def random_baseline_eval(records: Iterable[CorpusRecord], policy: Optional[RandomPolicy] = None,
                         with_ged: bool = False, ged_cfg: Optional[GedConfig] = None,
                         jobs: int = 1, convention: str = "standard") -> EvalReport:
    """gold 레코드마다 같은 이벤트 위에 무작위 스크립트를 만들어 채점"""
    policy = policy or RandomPolicy.from_config()
    pairs: List[EvalPair] = []
    for index, record in enumerate(records):
        gold = record.graph().reduced()
        events = [EventNode(e.id, e.text, e.duration) for e in gold.events]
        pred = random_script(events, policy.for_record(index), record.scenario)
        pairs.append(EvalPair(record.id, pred, [gold], split=record.split, source=record.source))
    logger.info(f"{policy.name} baseline over {len(pairs)} script(s), seed={policy.seed}")
    report = corpus_report(pairs, metric="both" if with_ged else "edges", convention=convention,
                           ged_cfg=_baseline_ged_config(ged_cfg), jobs=jobs, match="id")
    report.label = policy.name
    return report


def human_agreement_eval(records: Iterable[CorpusRecord], with_ged: bool = False,
                         ged_cfg: Optional[GedConfig] = None, jobs: int = 1,
                         convention: str = "standard") -> EvalReport:
    """두 번째 annotator(alt_edges)를 예측으로, 주 annotator 를 정답으로 채점"""
    pairs: List[EvalPair] = []
    skipped = 0
    for record in records:
        alt = record.alt_graph()
        if alt is None:
            skipped += 1
            continue
        pairs.append(EvalPair(record.id, alt.reduced(), [record.graph().reduced()],
                              split=record.split, source=record.source))
    if skipped:
        logger.warning(f"{skipped} record(s) without alt_edges left out of the human row")
    report = corpus_report(pairs, metric="both" if with_ged else "edges", convention=convention,
                           ged_cfg=_baseline_ged_config(ged_cfg), jobs=jobs, match="id")
    report.label = "human"
    return report
