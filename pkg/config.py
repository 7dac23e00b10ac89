"""
Script Toolkit Configuration
"""
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from errors import InvalidArgumentError

# 환경 변수
SEED_ENV_VAR = "PROSCRIPT_SEED"
LOG_LEVEL_ENV_VAR = "PROSCRIPT_LOG_LEVEL"

# 소요 시간 버킷 (초 단위, [lo, hi))
DURATION_BUCKETS: Dict[str, Tuple[float, float]] = {
    "seconds": (1.0, 60.0),
    "minutes": (60.0, 3600.0),
    "hours": (3600.0, 86400.0),
    "days": (86400.0, 604800.0),
    "weeks": (604800.0, 2.63e6),
    "months": (2.63e6, 3.15e7),
    "years": (3.15e7, float("inf")),
}
DURATION_ORDER: List[str] = list(DURATION_BUCKETS)

# 편집 연산 종류 (표 컬럼 순서)
EDIT_KINDS: List[str] = ["V-Del", "V-Ins", "V-Rep", "E-Del", "E-Ins", "E-Rep"]

# 코퍼스 메타데이터
SOURCES: List[str] = ["rocstories", "descript", "virtualhome", "other"]
SPLITS: List[str] = ["train", "dev", "test"]
IN_DOMAIN_SOURCES: List[str] = ["rocstories"]

DEGREE_MODES = ("max-in-out", "in", "out", "total")
EDGE_POLICIES = ("argmax-pair", "threshold")
CONVENTIONS = ("standard", "paper-literal")
NODE_MATCH_MODES = ("exact", "normalized")
EDGE_REP_MODES = ("off", "endpoint-rep")
RANDOM_POLICIES = ("random-chain", "random-dag")


def _check_choice(name: str, value: str, choices) -> None:
    if value not in choices:
        raise InvalidArgumentError(f"{name} must be one of {list(choices)}, got {value!r}")


@dataclass
class GraphConfig:
    degree_mode: str = "max-in-out"
    min_events_warn: int = 2
    max_events_warn: int = 12

    def __post_init__(self):
        _check_choice("degree_mode", self.degree_mode, DEGREE_MODES)


@dataclass
class AggregationConfig:
    edge_policy: str = "argmax-pair"
    tau: float = 0.5
    # 동률이면 작은 id → 큰 id 방향
    tie_break: str = "min-to-max"
    strict: bool = False
    epsilon: float = 1e-6

    def __post_init__(self):
        _check_choice("edge_policy", self.edge_policy, EDGE_POLICIES)
        _check_choice("tie_break", self.tie_break, ("min-to-max",))
        if not 0.0 < self.tau < 1.0:
            raise InvalidArgumentError(f"tau must lie in (0, 1), got {self.tau}")


@dataclass
class GedConfig:
    node_match: str = "normalized"
    max_exact_nodes: int = 12
    edge_rep_mode: str = "off"
    costs: Dict[str, float] = field(default_factory=lambda: {k: 1.0 for k in EDIT_KINDS})
    include_virtual: bool = False
    approximate: bool = False
    beam: int = 64

    def __post_init__(self):
        _check_choice("node_match", self.node_match, NODE_MATCH_MODES)
        _check_choice("edge_rep_mode", self.edge_rep_mode, EDGE_REP_MODES)
        if self.max_exact_nodes < 1:
            raise InvalidArgumentError("max_exact_nodes must be >= 1")
        if self.beam < 1:
            raise InvalidArgumentError("beam must be >= 1")
        unknown = set(self.costs) - set(EDIT_KINDS)
        if unknown:
            raise InvalidArgumentError(f"unknown edit kinds in cost table: {sorted(unknown)}")
        self.costs = {k: float(self.costs.get(k, 1.0)) for k in EDIT_KINDS}
        if any(c < 0 for c in self.costs.values()):
            raise InvalidArgumentError("edit costs must be non-negative")


@dataclass
class DatasetConfig:
    agreement_threshold: float = 65.0
    convention: str = "standard"

    def __post_init__(self):
        _check_choice("convention", self.convention, CONVENTIONS)


@dataclass
class BaselineConfig:
    policy: str = "random-chain"
    p_branch: float = 0.3
    seed: int = 0

    def __post_init__(self):
        _check_choice("policy", self.policy, RANDOM_POLICIES)
        if not 0.0 <= self.p_branch <= 1.0:
            raise InvalidArgumentError(f"p_branch must lie in [0, 1], got {self.p_branch}")


@dataclass
class ReportConfig:
    score_decimals: int = 2
    ged_decimals: int = 2
    op_decimals: int = 3
    ged_histogram_max: int = 6
    degree_bins: List[str] = field(default_factory=lambda: ["0", "1", "2", "3", "4+"])


def env_seed(default: int = 0) -> int:
    """PROSCRIPT_SEED 환경 변수 → seed (없으면 default)"""
    raw: Optional[str] = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw, 0)
    except ValueError:
        raise InvalidArgumentError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


graph_config = GraphConfig()
aggregation_config = AggregationConfig()
ged_config = GedConfig()
dataset_config = DatasetConfig()
baseline_config = BaselineConfig()
report_config = ReportConfig()
