"""
Errors - 스크립트 그래프/코덱/코퍼스 공통 예외
"""
from typing import Iterable, List, Optional, Tuple


class ScriptToolkitError(Exception):
    """모든 예외의 베이스"""


class InvalidArgumentError(ScriptToolkitError, ValueError):
    """잘못된 인자 (빈 텍스트, 없는 노드 id, 범위 밖 설정값 등)"""


class CycleViolationError(ScriptToolkitError):
    """간선이 방향 사이클을 만듦"""

    def __init__(self, message: str, edge: Optional[Tuple[int, int]] = None,
                 cycle: Optional[List[Tuple[int, int]]] = None):
        super().__init__(message)
        self.edge = edge
        self.cycle = cycle or []


class DotSyntaxError(ScriptToolkitError):
    """DOT 문법 오류 (line/column 1-based)"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UndeclaredIdentifierError(DotSyntaxError):
    """노드 선언 없이 간선에서 참조된 step id"""


class ParseFailureError(DotSyntaxError):
    """lenient 모드에서도 복구 불가능한 입력"""


class SizeLimitError(ScriptToolkitError):
    """정확 GED 탐색 허용 노드 수 초과"""

    def __init__(self, n_nodes: int, limit: int):
        super().__init__(f"exact GED limited to {limit} combined nodes, got {n_nodes}")
        self.n_nodes = n_nodes
        self.limit = limit


class RecordParseError(ScriptToolkitError):
    """JSONL 라인 파싱 실패"""

    def __init__(self, message: str, line_no: int = 0):
        self.line_no = line_no
        if line_no:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class SchemaError(RecordParseError):
    """필수 필드 누락 / 알 수 없는 필드 / 타입 오류"""

    def __init__(self, message: str, line_no: int = 0,
                 missing: Iterable[str] = (), extra: Iterable[str] = ()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        details = []
        if self.missing:
            details.append(f"missing fields {self.missing}")
        if self.extra:
            details.append(f"extra fields {self.extra}")
        if details:
            message = f"{message}: {', '.join(details)}"
        super().__init__(message, line_no)
