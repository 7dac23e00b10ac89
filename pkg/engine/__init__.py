"""
Engine Package - 계산 로직 (집계, 간선 F1, 편집 거리, 리포트, 기준선)
"""
from .aggregation import (
    PairwiseScores, WeightedDigraph, break_cycles, build_adjacency, oracle_scores, predict_edges, to_script,
)
from .metrics import PrfScore, edge_prf, mean_prf
from .ged import EditOp, EditScript, apply_edit_script, ged, ged_approx, ged_breakdown
from .report import EvalPair, EvalReport, ScriptEval, corpus_report, pair_up
from .baselines import (
    RandomPolicy, baseline_ged_config, human_agreement_eval, random_baseline_eval, random_script,
)

__all__ = [
    "PairwiseScores", "WeightedDigraph", "break_cycles", "build_adjacency", "oracle_scores",
    "predict_edges", "to_script",
    "PrfScore", "edge_prf", "mean_prf",
    "EditOp", "EditScript", "apply_edit_script", "ged", "ged_approx", "ged_breakdown",
    "EvalPair", "EvalReport", "ScriptEval", "corpus_report", "pair_up",
    "RandomPolicy", "baseline_ged_config", "human_agreement_eval", "random_baseline_eval", "random_script",
]
