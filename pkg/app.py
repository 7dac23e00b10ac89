"""
Script Toolkit CLI - 코퍼스 검증, 채점, 집계, 기준선, 통계, 포맷 변환

    python app.py validate corpus.jsonl
    python app.py eval --pred preds/ --gold corpus.jsonl --metric both
    python app.py aggregate --scores scores.json --policy threshold --tau 0.5
    python app.py baseline --gold corpus.jsonl --policy random-chain --seed 7
    python app.py stats corpus.jsonl --format csv
    python app.py convert --from jsonl --to dot corpus.jsonl out_dir/
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from codec import emit_dot
from config import (
    CONVENTIONS, EDGE_POLICIES, LOG_LEVEL_ENV_VAR, RANDOM_POLICIES, AggregationConfig, GedConfig,
    aggregation_config, dataset_config, env_seed, ged_config,
)
from corpus import (
    DotDirReader, agreement_f1, agreement_filter, corpus_stats, dump_jsonl, load_jsonl, write_dot_dir,
)
from engine import (
    PairwiseScores, RandomPolicy, baseline_ged_config, corpus_report, human_agreement_eval, pair_up,
    predict_edges, random_baseline_eval,
)
from engine.report import METRICS, EvalReport
from errors import (
    CycleViolationError, DotSyntaxError, InvalidArgumentError, RecordParseError, SchemaError,
    SizeLimitError,
)

logger = logging.getLogger("proscript")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_IO = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
FORMATS = {
    "validate": ("json",),
    "eval": ("json", "tsv"),
    "aggregate": ("dot",),
    "baseline": ("json", "tsv"),
    "stats": ("json", "csv"),
    "convert": ("jsonl", "dot"),
}


@dataclass
class CliConfig:
    """서브커맨드 + 플래그. I/O 전에 from_args 에서 모두 검증한다."""
    command: str
    fmt: str = "json"
    out: Optional[str] = None
    jobs: int = 1
    log_level: str = "WARNING"
    inputs: Dict[str, str] = field(default_factory=dict)
    metric: str = "both"
    convention: str = "standard"
    threshold: float = 65.0
    ged_cfg: GedConfig = field(default_factory=lambda: ged_config)
    agg_cfg: AggregationConfig = field(default_factory=lambda: aggregation_config)
    policy: Optional[RandomPolicy] = None
    with_ged: bool = False
    human: bool = False
    lenient: bool = False
    with_meta: bool = False
    fold_degree: Optional[int] = 4

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "CliConfig":
        cfg = cls(command=ns.command)
        cfg.out = getattr(ns, "out", None)
        cfg.jobs = ns.jobs
        if cfg.jobs < 1:
            raise InvalidArgumentError(f"--jobs must be >= 1, got {cfg.jobs}")
        cfg.log_level = (ns.log_level or os.environ.get(LOG_LEVEL_ENV_VAR) or "WARNING").upper()
        if cfg.log_level not in LOG_LEVELS:
            raise InvalidArgumentError(f"log level must be one of {list(LOG_LEVELS)}, got {cfg.log_level!r}")

        fmt = getattr(ns, "format", None) or FORMATS[ns.command][0]
        if fmt not in FORMATS[ns.command]:
            raise InvalidArgumentError(f"{ns.command} supports formats {list(FORMATS[ns.command])}, got {fmt!r}")
        cfg.fmt = fmt

        if ns.command == "validate":
            cfg.inputs = {"corpus": ns.corpus}
            cfg.threshold = dataset_config.agreement_threshold if ns.threshold is None else ns.threshold
            cfg.convention = ns.convention
        elif ns.command == "eval":
            cfg.inputs = {"pred": ns.pred, "gold": ns.gold}
            cfg.metric = ns.metric
            cfg.convention = ns.convention
            limit = ged_config.max_exact_nodes if ns.ged_node_limit is None else ns.ged_node_limit
            cfg.ged_cfg = replace(ged_config, max_exact_nodes=limit,
                                  approximate=ns.approximate, include_virtual=ns.include_virtual,
                                  edge_rep_mode=ns.edge_rep)
        elif ns.command == "aggregate":
            cfg.inputs = {"scores": ns.scores, "scenario": ns.scenario}
            tau = aggregation_config.tau if ns.tau is None else ns.tau
            cfg.agg_cfg = AggregationConfig(edge_policy=ns.policy, tau=tau, strict=ns.strict)
            cfg.with_meta = ns.with_meta
        elif ns.command == "baseline":
            cfg.inputs = {"gold": ns.gold}
            seed = env_seed() if ns.seed is None else ns.seed
            cfg.policy = RandomPolicy(ns.policy, seed, ns.p_branch)
            cfg.with_ged = ns.with_ged
            cfg.ged_cfg = baseline_ged_config(include_virtual=not ns.events_only)
            cfg.human = ns.human
            cfg.convention = ns.convention
        elif ns.command == "stats":
            cfg.inputs = {"corpus": ns.corpus}
            cfg.fold_degree = ns.fold_degree
            if cfg.fold_degree is not None and cfg.fold_degree < 1:
                raise InvalidArgumentError("--fold-degree must be >= 1")
        elif ns.command == "convert":
            if ns.src_format == ns.dst_format:
                raise InvalidArgumentError("--from and --to must differ")
            cfg.fmt = ns.dst_format
            cfg.inputs = {"input": ns.input, "src": ns.src_format}
            cfg.out = ns.output
            cfg.lenient = ns.lenient

        if not 0.0 <= cfg.threshold <= 100.0:
            raise InvalidArgumentError(f"--threshold must lie in [0, 100], got {cfg.threshold}")
        return cfg


def _emit(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _reports_frame(reports: Sequence[EvalReport]) -> pd.DataFrame:
    frames = []
    for report in reports:
        frame = report.to_frame()
        frame.insert(0, "system", report.label or "pred")
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


# ===== 서브커맨드 =====

def cmd_validate(cfg: CliConfig) -> int:
    corpus = load_jsonl(cfg.inputs["corpus"])
    filtered = agreement_filter(corpus.records, cfg.threshold, replace(dataset_config, convention=cfg.convention))
    rejected = {r.id: f1 for r, f1 in filtered.rejected}

    records: List[Dict[str, Any]] = []
    for record in corpus.records:
        outcome: Dict[str, Any] = {"id": record.id, "line": record.line_no, "valid": True}
        if record.alt_edges is not None:
            outcome["agreement_f1"] = round(agreement_f1(record, cfg.convention).f1 * 100, 2)
        outcome["kept"] = record.id not in rejected
        records.append(outcome)
    for q in corpus.quarantined:
        records.append({"id": q.record_id, "line": q.line_no, "valid": False,
                        "violations": [v.to_dict() for v in q.violations]})
    records.sort(key=lambda r: r["line"])

    report = {
        "corpus": cfg.inputs["corpus"],
        "n_records": len(corpus.records) + len(corpus.quarantined),
        "n_valid": len(corpus.records),
        "n_invalid": len(corpus.quarantined),
        "threshold": cfg.threshold,
        "n_kept": len(filtered.kept),
        "n_rejected": len(filtered.rejected),
        "invalid_ids": [q.record_id for q in corpus.quarantined],
        "records": records,
    }
    _emit(_dumps(report), cfg.out)
    return EXIT_OK if not corpus.quarantined else EXIT_FAILED


def cmd_eval(cfg: CliConfig) -> int:
    gold_corpus = load_jsonl(cfg.inputs["gold"])
    golds: Dict[str, list] = {}
    for record in gold_corpus.records:
        golds.setdefault(record.id, []).append((record.graph().reduced(), record.split, record.source))

    pred_path = Path(cfg.inputs["pred"])
    if pred_path.is_dir():
        scenarios = {gold_id: entries[0][0].scenario for gold_id, entries in golds.items()}
        pred_corpus = DotDirReader(scenarios=scenarios).read(pred_path)
    else:
        pred_corpus = load_jsonl(pred_path)
    preds = [(r.id, r.graph().reduced()) for r in pred_corpus.records]

    pairs, missing, extra = pair_up(preds, golds)
    for pair in pairs:
        pair.warnings = pred_corpus.warnings.get(pair.id, [])
    report = corpus_report(pairs, metric=cfg.metric, convention=cfg.convention, ged_cfg=cfg.ged_cfg,
                           jobs=cfg.jobs)
    report.missing, report.extra = missing, extra
    for rid, messages in pred_corpus.warnings.items():
        report.warnings.setdefault(rid, list(messages))
    if missing or extra:
        logger.error(f"id mismatch: {len(missing)} gold id(s) without prediction, "
                     f"{len(extra)} prediction id(s) without gold")
    for rid, messages in sorted(report.warnings.items()):
        for message in messages:
            logger.warning(f"{rid}: {message}")

    _emit(_dumps(report.to_dict()) if cfg.fmt == "json" else report.to_tsv(), cfg.out)
    return EXIT_OK if report.ok else EXIT_FAILED


def _load_scores(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        obj = json.load(f)
    if not isinstance(obj, dict):
        raise SchemaError("scores file must hold a JSON object")
    missing = [k for k in ("events", "p") if k not in obj]
    if missing:
        raise SchemaError("scores file is missing fields", missing=missing)
    return obj


def cmd_aggregate(cfg: CliConfig) -> int:
    obj = _load_scores(cfg.inputs["scores"])
    scenario = cfg.inputs.get("scenario") or obj.get("scenario") or Path(cfg.inputs["scores"]).stem
    if not isinstance(obj["events"], list) or not all(isinstance(e, str) for e in obj["events"]):
        raise SchemaError("events must be a list of strings")
    scores = PairwiseScores.from_rows(obj["p"])
    g = predict_edges(obj["events"], scores, scenario, cfg.agg_cfg)
    meta = {"id": obj.get("id"), "scenario": scenario} if cfg.with_meta else None
    _emit(emit_dot(g, meta=meta), cfg.out)
    return EXIT_OK


def cmd_baseline(cfg: CliConfig) -> int:
    corpus = load_jsonl(cfg.inputs["gold"])
    reports = [random_baseline_eval(corpus.records, cfg.policy, with_ged=cfg.with_ged, ged_cfg=cfg.ged_cfg,
                                    jobs=cfg.jobs, convention=cfg.convention)]
    if cfg.human:
        reports.append(human_agreement_eval(corpus.records, with_ged=cfg.with_ged, ged_cfg=cfg.ged_cfg,
                                            jobs=cfg.jobs, convention=cfg.convention))
    if cfg.fmt == "json":
        payload = {"seed": cfg.policy.seed, "reports": [r.to_dict() for r in reports]}
        _emit(_dumps(payload), cfg.out)
    else:
        _emit(_reports_frame(reports).to_csv(sep="\t", index=False, lineterminator="\n"), cfg.out)
    return EXIT_OK


def cmd_stats(cfg: CliConfig) -> int:
    corpus = load_jsonl(cfg.inputs["corpus"])
    stats = corpus_stats(corpus.records)
    if cfg.fmt == "json":
        payload = stats.to_dict()
        payload["degree_hist"] = stats.degree_histogram(cfg.fold_degree)
        payload["n_quarantined"] = len(corpus.quarantined)
        _emit(_dumps(payload), cfg.out)
    else:
        _emit(stats.to_frame().to_csv(index=False, lineterminator="\n"), cfg.out)
    return EXIT_OK


def cmd_convert(cfg: CliConfig) -> int:
    src = cfg.inputs["src"]
    if src == "jsonl":
        corpus = load_jsonl(cfg.inputs["input"])
    else:
        corpus = DotDirReader(strict=not cfg.lenient).read(cfg.inputs["input"])
    if cfg.fmt == "dot":
        n = write_dot_dir(corpus.records, cfg.out)
    else:
        n = dump_jsonl(corpus.records, cfg.out)
    logger.info(f"converted {n} record(s) {src} -> {cfg.fmt}")
    if corpus.quarantined:
        logger.error(f"{len(corpus.quarantined)} record(s) could not be converted: "
                     f"{[q.record_id for q in corpus.quarantined]}")
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "aggregate": cmd_aggregate,
    "baseline": cmd_baseline,
    "stats": cmd_stats,
    "convert": cmd_convert,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-script work")
    common.add_argument("--log-level", default=None, help=f"{'|'.join(LOG_LEVELS)} (env {LOG_LEVEL_ENV_VAR})")

    parser = argparse.ArgumentParser(prog="proscript", description="partially ordered script toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", parents=[common], help="validate a JSONL corpus + agreement filter")
    p_val.add_argument("corpus")
    p_val.add_argument("--threshold", type=float, default=None, help="agreement F1 threshold (x100)")
    p_val.add_argument("--convention", choices=CONVENTIONS, default=dataset_config.convention)
    p_val.add_argument("--out", default=None)

    p_eval = sub.add_parser("eval", parents=[common], help="score predictions against gold scripts")
    p_eval.add_argument("--pred", required=True, help="directory of <id>.dot files or a JSONL corpus")
    p_eval.add_argument("--gold", required=True)
    p_eval.add_argument("--metric", choices=METRICS, default="both")
    p_eval.add_argument("--convention", choices=CONVENTIONS, default="standard")
    p_eval.add_argument("--ged-node-limit", type=int, default=None)
    p_eval.add_argument("--approximate", action="store_true", help="beam search above the node limit")
    p_eval.add_argument("--include-virtual", action="store_true", help="score GED with root/leaf nodes")
    p_eval.add_argument("--edge-rep", choices=("off", "endpoint-rep"), default=ged_config.edge_rep_mode)
    p_eval.add_argument("--format", default=None, help="json|tsv")
    p_eval.add_argument("--out", default=None)

    p_agg = sub.add_parser("aggregate", parents=[common], help="pairwise scores -> DOT script")
    p_agg.add_argument("--scores", required=True)
    p_agg.add_argument("--policy", choices=EDGE_POLICIES, default=aggregation_config.edge_policy)
    p_agg.add_argument("--tau", type=float, default=None, help="threshold policy cut-off")
    p_agg.add_argument("--strict", action="store_true", help="require p[i][j] + p[j][i] = 1")
    p_agg.add_argument("--scenario", default=None, help="scenario text (else the file's \"scenario\" field)")
    p_agg.add_argument("--with-meta", action="store_true", help="write id/scenario comment lines")
    p_agg.add_argument("--out", default=None)

    p_base = sub.add_parser("baseline", parents=[common], help="random baseline rows")
    p_base.add_argument("--gold", required=True)
    p_base.add_argument("--policy", choices=RANDOM_POLICIES, default="random-chain")
    p_base.add_argument("--p-branch", type=float, default=0.3)
    p_base.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    p_base.add_argument("--with-ged", action="store_true")
    p_base.add_argument("--events-only", action="store_true", help="score GED without root/leaf nodes")
    p_base.add_argument("--human", action="store_true", help="add the second-annotator row")
    p_base.add_argument("--convention", choices=CONVENTIONS, default="standard")
    p_base.add_argument("--format", default=None, help="json|tsv")
    p_base.add_argument("--out", default=None)

    p_stats = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p_stats.add_argument("corpus")
    p_stats.add_argument("--fold-degree", type=int, default=4, help="fold degrees >= N into 'N+'")
    p_stats.add_argument("--format", default=None, help="json|csv")
    p_stats.add_argument("--out", default=None)

    p_conv = sub.add_parser("convert", parents=[common], help="JSONL corpus <-> DOT directory")
    p_conv.add_argument("--from", dest="src_format", choices=("jsonl", "dot"), required=True)
    p_conv.add_argument("--to", dest="dst_format", choices=("jsonl", "dot"), required=True)
    p_conv.add_argument("--lenient", action="store_true", help="recover from malformed DOT input")
    p_conv.add_argument("input")
    p_conv.add_argument("output")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_IO if e.code else EXIT_OK

    try:
        cfg = CliConfig.from_args(ns)
    except InvalidArgumentError as e:
        logger.error(f"usage: {e}")
        return EXIT_IO

    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(cfg.log_level)

    try:
        return COMMANDS[cfg.command](cfg)
    except (OSError, RecordParseError, DotSyntaxError, json.JSONDecodeError) as e:
        logger.error(f"{cfg.command}: {type(e).__name__}: {e}")
        return EXIT_IO
    except (InvalidArgumentError, CycleViolationError, SizeLimitError) as e:
        logger.error(f"{cfg.command}: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
