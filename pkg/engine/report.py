"""
Eval Report - 스크립트별 점수 + macro 평균 (간선 F1/P/R, 편집 거리, 연산별 개수)
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import (
    CONVENTIONS, EDIT_KINDS, IN_DOMAIN_SOURCES, GedConfig, ReportConfig, ged_config, report_config,
)
from errors import InvalidArgumentError, SizeLimitError
from graph import ScriptGraph
from .ged import ged, ged_breakdown, mean_breakdown
from .metrics import PrfScore, edge_prf, mean_prf

logger = logging.getLogger(__name__)

METRICS = ("edges", "ged", "both")
SCORE_COLUMNS = ["F1", "P", "R"]
GED_COLUMNS = ["Edit Dist"] + EDIT_KINDS


@dataclass
class EvalPair:
    """예측 하나와 정답 하나 이상 (정답이 여럿이면 점수를 평균)"""
    id: str
    pred: ScriptGraph
    golds: List[ScriptGraph]
    split: str = "test"
    source: str = "other"
    warnings: List[str] = field(default_factory=list)

    @property
    def domain(self) -> str:
        return "in-domain" if self.source in IN_DOMAIN_SOURCES else "out-of-domain"


@dataclass
class ScriptEval:
    id: str
    split: str
    domain: str
    gold_degree: int
    prf: Optional[PrfScore] = None
    ged: Optional[float] = None
    ops: Optional[Dict[str, float]] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class _Job:
    pair: EvalPair
    metric: str
    convention: str
    match: str
    ged_cfg: GedConfig


def _score_pair(job: _Job) -> ScriptEval:
    """워커 프로세스에서 실행. 스크립트 단위 실패는 error 로 기록한다."""
    pair = job.pair
    row = ScriptEval(pair.id, pair.split, pair.domain, pair.golds[0].max_degree() if pair.golds else 0)
    try:
        if not pair.golds:
            raise InvalidArgumentError("no gold script")
        if job.metric in ("edges", "both"):
            row.prf = mean_prf(edge_prf(pair.pred, gold, job.convention, job.match) for gold in pair.golds)
        if job.metric in ("ged", "both"):
            results = [ged(pair.pred, gold, job.ged_cfg) for gold in pair.golds]
            row.ged = float(np.mean([cost for cost, _ in results]))
            row.ops = mean_breakdown([ged_breakdown(script) for _, script in results])
    except (SizeLimitError, InvalidArgumentError) as e:
        row.prf, row.ged, row.ops = None, None, None
        row.error = f"{type(e).__name__}: {e}"
    return row


def _macro(rows: Sequence[ScriptEval]) -> Dict[str, Any]:
    scored = [r for r in rows if r.ok]
    prf = mean_prf(r.prf for r in scored if r.prf is not None)
    geds = [r.ged for r in scored if r.ged is not None]
    ops = [r.ops for r in scored if r.ops is not None]
    return {
        "n": len(scored),
        "prf": prf,
        "ged": float(np.mean(geds)) if geds else None,
        "ops": mean_breakdown(ops) if ops else None,
    }


def _degree_bin(degree: int, cfg: ReportConfig) -> str:
    top = cfg.degree_bins[-1]
    if top.endswith("+") and degree >= int(top[:-1]):
        return top
    return str(degree)


@dataclass
class EvalReport:
    metric: str = "both"
    convention: str = "standard"
    rows: List[ScriptEval] = field(default_factory=list)
    warnings: Dict[str, List[str]] = field(default_factory=dict)
    missing: List[str] = field(default_factory=list)
    extra: List[str] = field(default_factory=list)
    label: Optional[str] = None

    @property
    def errors(self) -> Dict[str, str]:
        return {r.id: r.error for r in self.rows if r.error is not None}

    @property
    def ok(self) -> bool:
        return not self.errors and not self.missing and not self.extra

    def macro(self) -> Dict[str, Any]:
        return _macro(self.rows)

    def by_group(self) -> Dict[str, Dict[str, Any]]:
        """split 별, split × (in/out domain) 별 macro"""
        groups: Dict[str, List[ScriptEval]] = {}
        for r in self.rows:
            groups.setdefault(r.split, []).append(r)
            tag = "in domain" if r.domain == "in-domain" else "out domain"
            groups.setdefault(f"{r.split} ({tag})", []).append(r)
        return {name: _macro(groups[name]) for name in sorted(groups)}

    def by_degree(self, cfg: Optional[ReportConfig] = None) -> Dict[str, Dict[str, Any]]:
        """정답 스크립트 최대 차수 구간별 macro"""
        cfg = cfg or report_config
        groups: Dict[str, List[ScriptEval]] = {}
        for r in self.rows:
            groups.setdefault(_degree_bin(r.gold_degree, cfg), []).append(r)
        order = {name: i for i, name in enumerate(cfg.degree_bins)}
        return {name: _macro(groups[name])
                for name in sorted(groups, key=lambda k: (order.get(k, len(order)), k))}

    def ged_histogram(self, cfg: Optional[ReportConfig] = None) -> Dict[str, int]:
        """편집 거리(내림) 구간별 스크립트 수. 마지막 구간은 'N+'"""
        cfg = cfg or report_config
        top = cfg.ged_histogram_max
        values = [r.ged for r in self.rows if r.ok and r.ged is not None]
        binned = np.minimum(np.floor(np.asarray(values, dtype=float)), top).astype(int)
        counts = np.bincount(binned, minlength=top + 1)
        names = [str(i) for i in range(top)] + [f"{top}+"]
        return {name: int(c) for name, c in zip(names, counts)}

    # ----- 직렬화 (JSON 과 TSV 가 같은 반올림 값을 쓴다) -----

    def _format(self, prf: Optional[PrfScore], ged_value: Optional[float],
                ops: Optional[Dict[str, float]], cfg: ReportConfig) -> Dict[str, Optional[float]]:
        out: Dict[str, Optional[float]] = {}
        if self.metric in ("edges", "both"):
            scaled = prf.scaled() if prf is not None else {}
            for column, key in zip(SCORE_COLUMNS, ("f1", "precision", "recall")):
                out[column] = round(scaled[key], cfg.score_decimals) if key in scaled else None
        if self.metric in ("ged", "both"):
            out["Edit Dist"] = round(ged_value, cfg.ged_decimals) if ged_value is not None else None
            for kind in EDIT_KINDS:
                out[kind] = round(ops[kind], cfg.op_decimals) if ops is not None else None
        return out

    def _summary_row(self, name: str, summary: Dict[str, Any], cfg: ReportConfig) -> Dict[str, Any]:
        row: Dict[str, Any] = {"id": name, "n": summary["n"]}
        row.update(self._format(summary["prf"], summary["ged"], summary["ops"], cfg))
        return row

    def to_records(self, cfg: Optional[ReportConfig] = None) -> List[Dict[str, Any]]:
        cfg = cfg or report_config
        records = []
        for r in self.rows:
            record: Dict[str, Any] = {"id": r.id, "split": r.split, "domain": r.domain,
                                      "gold_degree": r.gold_degree}
            record.update(self._format(r.prf, r.ged, r.ops, cfg))
            record["error"] = r.error
            records.append(record)
        return records

    def to_dict(self, cfg: Optional[ReportConfig] = None) -> Dict[str, Any]:
        cfg = cfg or report_config
        return {
            "label": self.label,
            "metric": self.metric,
            "convention": self.convention,
            "n_scripts": len(self.rows),
            "macro": self._summary_row("macro", self.macro(), cfg),
            "by_group": [self._summary_row(k, v, cfg) for k, v in self.by_group().items()],
            "by_degree": [self._summary_row(k, v, cfg) for k, v in self.by_degree(cfg).items()],
            "ged_histogram": self.ged_histogram(cfg) if self.metric != "edges" else None,
            "scripts": self.to_records(cfg),
            "warnings": {k: list(v) for k, v in sorted(self.warnings.items())},
            "errors": self.errors,
            "missing": list(self.missing),
            "extra": list(self.extra),
        }

    def to_frame(self, cfg: Optional[ReportConfig] = None) -> pd.DataFrame:
        """스크립트 행 + macro / 그룹 행 (표 레이아웃)"""
        cfg = cfg or report_config
        rows = [{**rec, "section": "script"} for rec in self.to_records(cfg)]
        rows.append({**self._summary_row("macro", self.macro(), cfg), "section": "macro"})
        for name, summary in self.by_group().items():
            rows.append({**self._summary_row(name, summary, cfg), "section": "group"})
        for name, summary in self.by_degree(cfg).items():
            rows.append({**self._summary_row(f"degree {name}", summary, cfg), "section": "degree"})
        columns = ["section", "id", "split", "domain", "gold_degree", "n"]
        if self.metric in ("edges", "both"):
            columns += SCORE_COLUMNS
        if self.metric in ("ged", "both"):
            columns += GED_COLUMNS
        columns.append("error")
        frame = pd.DataFrame(rows, columns=columns)
        frame["gold_degree"] = frame["gold_degree"].astype("Int64")
        frame["n"] = frame["n"].astype("Int64")
        return frame

    def to_tsv(self, cfg: Optional[ReportConfig] = None) -> str:
        return self.to_frame(cfg).to_csv(sep="\t", index=False, lineterminator="\n")


def corpus_report(pairs: Sequence[EvalPair], metric: str = "both", convention: str = "standard",
                  ged_cfg: Optional[GedConfig] = None, jobs: int = 1, match: str = "label") -> EvalReport:
    """스크립트 단위 병렬 채점. 결과 순서는 입력 순서 그대로."""
    if metric not in METRICS:
        raise InvalidArgumentError(f"metric must be one of {list(METRICS)}, got {metric!r}")
    if convention not in CONVENTIONS:
        raise InvalidArgumentError(f"convention must be one of {list(CONVENTIONS)}, got {convention!r}")
    if jobs < 1:
        raise InvalidArgumentError("jobs must be a positive integer")
    cfg = ged_cfg or ged_config
    work = [_Job(pair, metric, convention, match, cfg) for pair in pairs]

    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_score_pair, work, chunksize=max(1, len(work) // (jobs * 4))))
    else:
        rows = [_score_pair(job) for job in work]

    report = EvalReport(metric=metric, convention=convention, rows=rows)
    for pair in pairs:
        if pair.warnings:
            report.warnings[pair.id] = list(pair.warnings)
    for r in rows:
        if r.error is not None:
            logger.warning(f"script {r.id!r} not scored: {r.error}")
    logger.info(f"scored {len(rows) - len(report.errors)}/{len(rows)} script(s)")
    return report


def pair_up(preds: Sequence[Tuple[str, ScriptGraph]], golds: Dict[str, List[Tuple[ScriptGraph, str, str]]]
            ) -> Tuple[List[EvalPair], List[str], List[str]]:
    """id 로 예측과 정답을 묶는다. 반환: (pairs, 예측 없는 gold id, gold 없는 예측 id)"""
    pairs: List[EvalPair] = []
    seen = set()
    extra: List[str] = []
    for pred_id, pred in preds:
        if pred_id not in golds:
            extra.append(pred_id)
            continue
        entries = golds[pred_id]
        seen.add(pred_id)
        pairs.append(EvalPair(pred_id, pred, [g for g, _, _ in entries],
                              split=entries[0][1], source=entries[0][2]))
    missing = [gold_id for gold_id in golds if gold_id not in seen]
    return pairs, missing, extra
