"""
DOT Directory Reader - `<id>.dot` 파일 디렉터리 (모델 예측 출력) 입출력
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, Optional, Set, Union

from codec import emit_dot, parse_script
from config import SOURCES, SPLITS
from errors import CycleViolationError, DotSyntaxError, InvalidArgumentError
from .base import BaseReader, Corpus, CorpusRecord
from .jsonl import JsonlReader

logger = logging.getLogger(__name__)

DOT_SUFFIX = ".dot"


class DotDirReader(BaseReader):
    """
    strict=False (기본): 관대한 파싱, 복구 경고는 corpus.warnings[id] 로 노출
    scenario 가 '// scenario' 주석에 없으면 scenarios[id], 그다음 파일 이름을 쓴다
    """
    FORMAT_NAME = "dot"

    def __init__(self, strict: bool = False, scenarios: Optional[Dict[str, str]] = None):
        super().__init__(strict)
        self.scenarios = scenarios or {}

    def read(self, path: Union[str, Path]) -> Corpus:
        root = Path(path)
        if not root.is_dir():
            raise FileNotFoundError(f"prediction directory not found: {root}")
        corpus = Corpus()
        for line_no, file in enumerate(sorted(root.glob(f"*{DOT_SUFFIX}")), 1):
            stem = file.stem
            text = file.read_text(encoding="utf-8")
            try:
                result = parse_script(text, lenient=not self.strict,
                                      default_scenario=self.scenarios.get(stem, stem))
            except (DotSyntaxError, CycleViolationError, InvalidArgumentError) as e:
                if self.strict:
                    raise
                logger.debug(f"{file.name}: unparseable ({e})")
                self._reject(corpus, line_no, stem, "PARSE_FAILURE", f"{file.name}: {e}")
                continue

            meta = result.meta
            record_id = meta.get("id") or stem
            source = meta.get("source") if meta.get("source") in SOURCES else "other"
            split = meta.get("split") if meta.get("split") in SPLITS else "test"
            record = CorpusRecord.from_graph(record_id, result.graph, source=source, split=split)
            record.line_no = line_no
            if result.diagnostics.recovered:
                corpus.warnings[record_id] = [
                    f"{file.name}:{w.line}:{w.column} {w.code} {w.message}"
                    for w in result.diagnostics.warnings
                ]
            self._admit(corpus, record)
        logger.info(f"loaded {len(corpus.records)} DOT script(s) from {root}")
        return corpus


def _file_stem(record_id: str, taken: Set[str]) -> str:
    """같은 id 의 두 번째 레코드부터 `<id>~<k>` (원래 id 는 '// id' 주석에 남는다)"""
    stem, k = record_id, 1
    while stem in taken:
        k += 1
        stem = f"{record_id}~{k}"
    taken.add(stem)
    return stem


def write_dot_dir(records: Iterable[CorpusRecord], out_dir: Union[str, Path]) -> int:
    """레코드마다 `<id>.dot` 한 파일. 두 번째 annotator 간선은 DOT 로 표현되지 않는다."""
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    taken: Set[str] = set()
    n = 0
    for record in records:
        stem = _file_stem(record.id, taken)
        if stem != record.id:
            logger.warning(f"record id {record.id!r} repeats, written to {stem}{DOT_SUFFIX}")
        if record.alt_edges is not None:
            logger.warning(f"record {record.id!r}: alt_edges are not carried by DOT output")
        meta = {"id": record.id, "scenario": record.scenario, "source": record.source, "split": record.split}
        text = emit_dot(record.graph().reduced(), meta=meta)
        (target / f"{stem}{DOT_SUFFIX}").write_text(text, encoding="utf-8")
        n += 1
    return n


READER_MAP = {
    "jsonl": JsonlReader,
    "dot": DotDirReader,
}


def detect_format(path: Union[str, Path]) -> str:
    return "dot" if Path(path).is_dir() else "jsonl"


def read_corpus(path: Union[str, Path], fmt: Optional[str] = None, **kwargs) -> Corpus:
    fmt = fmt or detect_format(path)
    if fmt not in READER_MAP:
        raise InvalidArgumentError(f"unknown corpus format {fmt!r}, expected one of {sorted(READER_MAP)}")
    return READER_MAP[fmt](**kwargs).read(path)
