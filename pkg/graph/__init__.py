"""
Graph Package - 스크립트 DAG 모델
"""
from .script_graph import (
    LEAF, REPAIRABLE_CODES, ROOT, AddEdgeResult, DurationBucket, Edge, EventNode,
    ScriptGraph, ValidationReport, Violation, is_acyclic, new_graph, transitive_reduction,
)

__all__ = [
    "LEAF", "REPAIRABLE_CODES", "ROOT", "AddEdgeResult", "DurationBucket", "Edge", "EventNode",
    "ScriptGraph", "ValidationReport", "Violation", "is_acyclic", "new_graph", "transitive_reduction",
]
