"""
JSONL Reader - 한 줄에 레코드 하나인 코퍼스 파일 입출력
"""
import json
import logging
from pathlib import Path
from typing import Iterable, Union

from errors import RecordParseError
from .base import BaseReader, Corpus, CorpusRecord

logger = logging.getLogger(__name__)


class JsonlReader(BaseReader):
    """
    strict=True: 깨진 JSON 줄/스키마 위반은 즉시 예외 (줄 번호 포함)
    strict=False: 해당 줄을 격리하고 계속 읽는다
    구조(DAG) 위반은 두 모드 모두 격리
    """
    FORMAT_NAME = "jsonl"

    def read(self, path: Union[str, Path]) -> Corpus:
        corpus = Corpus()
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    error = RecordParseError(f"malformed JSON: {e.msg}", line_no)
                    if self.strict:
                        raise error
                    self._reject(corpus, line_no, None, "BAD_JSON", str(error))
                    continue
                try:
                    record = CorpusRecord.from_dict(obj, line_no)
                except RecordParseError as e:
                    if self.strict:
                        raise
                    record_id = obj.get("id") if isinstance(obj, dict) else None
                    self._reject(corpus, line_no, None if record_id is None else str(record_id),
                                 "SCHEMA", str(e))
                    continue
                logger.debug(f"line {line_no}: record {record.id!r} with {record.n_events} events")
                self._admit(corpus, record)
        logger.info(f"loaded {len(corpus.records)} record(s) from {path}, "
                    f"{len(corpus.quarantined)} quarantined")
        return corpus


def load_jsonl(path: Union[str, Path], strict: bool = True) -> Corpus:
    return JsonlReader(strict=strict).read(path)


def dumps_record(record: CorpusRecord) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False)


def dump_jsonl(records: Iterable[CorpusRecord], path: Union[str, Path]) -> int:
    """정규 필드 순서로 기록, 기록한 레코드 수 반환"""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(dumps_record(record) + "\n")
            n += 1
    return n
