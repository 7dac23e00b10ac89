"""
DOT Codec - 스크립트 그래프 ↔ DOT 서브셋 텍스트

정규 문법:
    digraph {
    step0 [label="gather the ingredients"];
    // duration step0 minutes
    step1 [label="mix the batter"];
    step0 -> step1;
    }

노드 줄은 id 순서, 간선 줄은 (src, dst) 사전순, LF 줄바꿈, 마지막 줄바꿈 없음.
`// <key> <value>` 주석 줄은 메타데이터 (scenario, id, source, split, duration).
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import networkx as nx

from errors import (
    CycleViolationError, DotSyntaxError, InvalidArgumentError, ParseFailureError,
    UndeclaredIdentifierError,
)
from graph import DurationBucket, EventNode, ScriptGraph, transitive_reduction
from normalizer import normalize_label

logger = logging.getLogger(__name__)

STEP_RE = re.compile(r"^step([0-9]+)$")
META_KEYS = ("id", "scenario", "source", "split")
UNTITLED_SCENARIO = "untitled script"

_TOKEN_SPEC = [
    ("NEWLINE", r"\n"),
    # `#` 는 줄 맨 앞에서만 주석
    ("HASH_LINE", r"(?<![^\n])[ \t]*#[^\n]*"),
    ("WS", r"[ \t\r\f\v]+"),
    ("COMMENT", r"//[^\n]*"),
    ("BLOCK_COMMENT", r"/\*.*?\*/"),
    ("STRING", r'"(?:[^"\\]|\\.)*"'),
    ("ARROW", r"->"),
    ("UNDIRECTED", r"--"),
    ("ID", r"[A-Za-z_\u0080-\uffff][A-Za-z0-9_\u0080-\uffff]*|-?(?:\.[0-9]+|[0-9]+(?:\.[0-9]*)?)"),
    ("PUNCT", r"[{}\[\];,=:]"),
    ("CHAR", r"."),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC), re.S)
_ESCAPE = re.compile(r"\\(.)", re.S)


@dataclass
class Token:
    kind: str
    value: str
    line: int
    column: int
    start: int
    end: int


@dataclass
class NodeStmt:
    step: int
    label: Optional[str]
    line: int
    column: int


@dataclass
class EdgeStmt:
    src: int
    dst: int
    line: int
    column: int


@dataclass
class DotDocument:
    """파싱된 DOT 문서 (문장 순서 유지)"""
    statements: List[Union[NodeStmt, EdgeStmt]] = field(default_factory=list)
    durations: Dict[int, Tuple[DurationBucket, int]] = field(default_factory=dict)
    meta: Dict[str, str] = field(default_factory=dict)

    @property
    def nodes(self) -> List[NodeStmt]:
        return [s for s in self.statements if isinstance(s, NodeStmt)]

    @property
    def edges(self) -> List[EdgeStmt]:
        return [s for s in self.statements if isinstance(s, EdgeStmt)]


@dataclass
class ParseWarning:
    line: int
    column: int
    code: str
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return {"line": self.line, "column": self.column, "code": self.code, "message": self.message}


@dataclass
class ParseDiagnostics:
    warnings: List[ParseWarning] = field(default_factory=list)

    @property
    def recovered(self) -> bool:
        return bool(self.warnings)

    @property
    def codes(self) -> List[str]:
        return [w.code for w in self.warnings]

    def add(self, line: int, column: int, code: str, message: str) -> None:
        self.warnings.append(ParseWarning(line, column, code, message))


@dataclass
class ParseResult:
    graph: ScriptGraph
    diagnostics: ParseDiagnostics
    meta: Dict[str, str]


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _unescape(body: str) -> str:
    return _ESCAPE.sub(lambda m: "\n" if m.group(1) == "n" else m.group(1), body)


def _tokenize(text: str) -> Tuple[List[Token], List[Tuple[int, int, str]]]:
    tokens: List[Token] = []
    comments: List[Tuple[int, int, str]] = []
    line, line_start = 1, 0
    for m in _MASTER.finditer(text):
        kind, value = m.lastgroup, m.group()
        column = m.start() - line_start + 1
        if kind == "NEWLINE":
            line, line_start = line + 1, m.end()
            continue
        if kind in ("WS", "HASH_LINE"):
            continue
        if kind == "COMMENT":
            comments.append((line, column, value[2:].strip()))
            continue
        if kind == "BLOCK_COMMENT":
            if "\n" in value:
                line += value.count("\n")
                line_start = m.start() + value.rfind("\n") + 1
            continue
        tokens.append(Token(kind, value, line, column, m.start(), m.end()))
    return tokens, comments


class _DotParser:
    """정규 문법에 대한 재귀 하강 파서 (lenient 모드는 경고 후 복구)"""

    def __init__(self, text: str, lenient: bool, diagnostics: ParseDiagnostics):
        self.text = text
        self.lenient = lenient
        self.diagnostics = diagnostics
        self.tokens, self.comments = _tokenize(text)
        self.pos = 0
        self.doc = DotDocument()

    # ----- 토큰 유틸 -----

    def _peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _at(self, kind: str, value: Optional[str] = None, offset: int = 0) -> bool:
        tok = self._peek(offset)
        return tok is not None and tok.kind == kind and (value is None or tok.value == value)

    def _where(self, tok: Optional[Token]) -> Tuple[int, int]:
        if tok is not None:
            return tok.line, tok.column
        if self.tokens:
            last = self.tokens[-1]
            return last.line, last.column + len(last.value)
        return 1, 1

    def _error(self, message: str, tok: Optional[Token], exc=DotSyntaxError):
        line, column = self._where(tok)
        raise exc(message, line, column)

    def _recover(self, code: str, message: str, tok: Optional[Token]) -> None:
        """strict 모드면 오류, lenient 모드면 경고 기록"""
        if not self.lenient:
            self._error(message, tok)
        line, column = self._where(tok)
        self.diagnostics.add(line, column, code, message)
        logger.debug(f"recovered {code} at {line}:{column}: {message}")

    def _expect_punct(self, value: str, code: str) -> bool:
        if self._at("PUNCT", value):
            self._advance()
            return True
        self._recover(code, f"expected {value!r}", self._peek())
        return False

    def _skip_statement(self) -> None:
        depth = 0
        while self._peek() is not None:
            tok = self._peek()
            if tok.kind == "PUNCT" and tok.value == ";" and depth == 0:
                self._advance()
                return
            if tok.kind == "PUNCT" and tok.value == "}":
                if depth == 0:
                    return
                depth -= 1
                self._advance()
                if depth == 0:
                    return
                continue
            if tok.kind == "PUNCT" and tok.value == "{":
                depth += 1
            self._advance()

    # ----- 문법 -----

    def parse(self) -> DotDocument:
        self._parse_comments()
        if self._at("ID", "strict"):
            self._recover("STRICT_KEYWORD", "'strict' graphs are not supported", self._peek())
            self._advance()
        if not self._at("ID", "digraph"):
            if not self.lenient:
                self._error("expected 'digraph' header", self._peek())
            start = self._peek()
            while self._peek() is not None and not self._at("ID", "digraph"):
                self._advance()
            if self._peek() is None:
                self._error("no 'digraph' header found", start, ParseFailureError)
            self._recover("LEADING_TEXT", "text before 'digraph' header ignored", start)
        self._advance()

        if self._at("ID") or self._at("STRING"):
            self._recover("GRAPH_NAME", "graph names are not supported", self._peek())
            self._advance()
        self._expect_punct("{", "MISSING_BRACE")

        while self._peek() is not None and not self._at("PUNCT", "}"):
            self._parse_stmt()

        if self._peek() is None:
            self._recover("MISSING_BRACE", "missing closing '}'", None)
        else:
            self._advance()
            if self._peek() is not None:
                self._recover("TRAILING_TEXT", "text after closing '}' ignored", self._peek())
        return self.doc

    def _parse_comments(self) -> None:
        for line, column, body in self.comments:
            parts = body.split(None, 1)
            if not parts:
                continue
            key = parts[0]
            rest = parts[1].strip() if len(parts) > 1 else ""
            if key in META_KEYS:
                self.doc.meta[key] = rest
            elif key == "duration":
                self._parse_duration(rest, line, column)

    def _parse_duration(self, rest: str, line: int, column: int) -> None:
        fields = rest.split()
        m = STEP_RE.match(fields[0]) if fields else None
        try:
            if m is None or len(fields) not in (2, 3):
                raise InvalidArgumentError(f"malformed duration comment {rest!r}")
            seconds = float(fields[2]) if len(fields) == 3 else None
            self.doc.durations[int(m.group(1))] = (DurationBucket(fields[1], seconds), line)
        except (InvalidArgumentError, ValueError) as e:
            if not self.lenient:
                raise DotSyntaxError(str(e), line, column)
            self.diagnostics.add(line, column, "BAD_DURATION", str(e))

    def _parse_stmt(self) -> None:
        tok = self._peek()
        if tok.kind == "PUNCT" and tok.value == ";":
            self._recover("EMPTY_STATEMENT", "empty statement", tok)
            self._advance()
            return
        if tok.kind == "ID" and tok.value in ("subgraph", "node", "edge", "graph") or \
                (tok.kind == "PUNCT" and tok.value == "{"):
            self._recover("SKIPPED_STATEMENT", f"unsupported DOT statement {tok.value!r}", tok)
            self._skip_statement()
            return
        if tok.kind not in ("ID", "STRING"):
            self._recover("SKIPPED_STATEMENT", f"unexpected token {tok.value!r}", tok)
            self._advance()
            self._skip_statement()
            return

        first = self._parse_step_id()
        if self._at("ARROW"):
            steps = [first]
            while self._at("ARROW"):
                self._advance()
                if self._peek() is None:
                    self._recover("SKIPPED_STATEMENT", "edge statement ends after '->'", None)
                    return
                steps.append(self._parse_step_id())
            if len(steps) > 2:
                self._recover("EDGE_CHAIN", "edge chains are not canonical", tok)
            if self._at("PUNCT", "["):
                self._recover("UNSUPPORTED_ATTR", "edge attributes are not supported", self._peek())
                self._parse_attr_list()
            if any(s is None for s in steps):
                self._skip_statement()
                return
            for src, dst in zip(steps, steps[1:]):
                self.doc.statements.append(EdgeStmt(src, dst, tok.line, tok.column))
        elif self._at("UNDIRECTED"):
            self._recover("SKIPPED_STATEMENT", "undirected edges are not supported", self._peek())
            self._skip_statement()
            return
        else:
            label = None
            if self._at("PUNCT", "["):
                label = self._parse_attr_list().get("label")
            if label is None:
                self._recover("MISSING_LABEL", "node statement without label", tok)
            if first is not None and label is not None:
                self.doc.statements.append(NodeStmt(first, label, tok.line, tok.column))
            elif first is None:
                self._skip_statement()
                return

        if self._at("PUNCT", ";"):
            self._advance()
        else:
            self._recover("MISSING_SEMICOLON", "missing ';' after statement", self._peek() or tok)

    def _parse_step_id(self) -> Optional[int]:
        tok = self._peek()
        if tok.kind not in ("ID", "STRING"):
            # 식별자가 아닌 토큰은 소비하지 않는다
            self._recover("BAD_IDENTIFIER", f"expected step identifier, got {tok.value!r}", tok)
            return None
        self._advance()
        value = tok.value
        if tok.kind == "STRING":
            self._recover("QUOTED_ID", "quoted identifiers are not canonical", tok)
            value = _unescape(value[1:-1])
        if self._at("PUNCT", ":"):
            self._recover("UNSUPPORTED_PORT", "node ports are not supported", self._peek())
            self._advance()
            if self._at("ID"):
                self._advance()
        m = STEP_RE.match(value)
        if m is None:
            self._recover("BAD_IDENTIFIER", f"identifier {value!r} does not match step<k>", tok)
            return None
        return int(m.group(1))

    def _parse_attr_list(self) -> Dict[str, str]:
        attrs: Dict[str, str] = {}
        self._advance()  # '['
        while self._peek() is not None and not self._at("PUNCT", "]"):
            key_tok = self._advance()
            if key_tok.kind != "ID":
                self._recover("BAD_ATTRIBUTE", f"unexpected token {key_tok.value!r} in attribute list", key_tok)
                continue
            if not self._expect_punct("=", "BAD_ATTRIBUTE"):
                continue
            value = self._parse_attr_value()
            if key_tok.value != "label":
                self._recover("UNSUPPORTED_ATTR", f"attribute {key_tok.value!r} is not supported", key_tok)
            elif value is not None:
                attrs["label"] = value
            if self._at("PUNCT", ",") or self._at("PUNCT", ";"):
                self._advance()
        if self._peek() is None:
            self._recover("MISSING_BRACKET", "unterminated attribute list", None)
        else:
            self._advance()  # ']'
        return attrs

    def _parse_attr_value(self) -> Optional[str]:
        tok = self._peek()
        if tok is None:
            return None
        if tok.kind == "STRING":
            self._advance()
            return _unescape(tok.value[1:-1])
        # 따옴표 없는 라벨: 같은 줄의 ']' / ',' / ';' 전까지 원문 그대로
        first = last = None
        while self._peek() is not None and self._peek().line == tok.line and not (
                self._at("PUNCT", "]") or self._at("PUNCT", ",") or self._at("PUNCT", ";")):
            last = self._advance()
            first = first or last
        if first is None:
            self._recover("BAD_ATTRIBUTE", "missing attribute value", tok)
            return None
        self._recover("UNQUOTED_LABEL", "attribute value is not quoted", first)
        return self.text[first.start:last.end]


def _build_graph(doc: DotDocument, scenario: Optional[str], lenient: bool,
                 diagnostics: ParseDiagnostics, default_scenario: Optional[str] = None) -> ScriptGraph:
    scenario = scenario or doc.meta.get("scenario") or default_scenario
    if not scenario or not normalize_label(scenario):
        if not lenient:
            raise InvalidArgumentError("scenario must be supplied (parameter or '// scenario' comment)")
        diagnostics.add(1, 1, "MISSING_SCENARIO", f"no scenario given, using {UNTITLED_SCENARIO!r}")
        scenario = UNTITLED_SCENARIO

    def recover(stmt, code: str, message: str, exc=DotSyntaxError):
        if not lenient:
            raise exc(message, stmt.line, stmt.column)
        diagnostics.add(stmt.line, stmt.column, code, message)

    labels: Dict[int, str] = {}
    for stmt in doc.nodes:
        if not normalize_label(stmt.label):
            recover(stmt, "EMPTY_LABEL", f"step{stmt.step} has an empty label")
            continue
        if stmt.step in labels:
            recover(stmt, "DUP_NODE", f"step{stmt.step} declared more than once (last wins)")
        labels[stmt.step] = stmt.label

    steps = sorted(labels)
    remap = {step: i for i, step in enumerate(steps)}
    if steps != list(range(len(steps))):
        if not lenient:
            first = doc.nodes[0]
            raise DotSyntaxError(f"step ids {steps} must be contiguous from step0", first.line, first.column)
        diagnostics.add(1, 1, "RENUMBERED", f"step ids {steps} renumbered to 0..{len(steps) - 1}")

    events = [EventNode(remap[step], labels[step]) for step in steps]
    for step, (duration, line) in sorted(doc.durations.items()):
        if step not in remap:
            if not lenient:
                raise DotSyntaxError(f"duration for undeclared step{step}", line, 1)
            diagnostics.add(line, 1, "BAD_DURATION", f"duration for undeclared step{step} ignored")
            continue
        events[remap[step]].duration = duration

    kept = nx.DiGraph()
    kept.add_nodes_from(range(len(events)))
    edge_lines: Dict[Tuple[int, int], EdgeStmt] = {}
    for stmt in doc.edges:
        if stmt.src not in remap or stmt.dst not in remap:
            missing = stmt.src if stmt.src not in remap else stmt.dst
            recover(stmt, "UNDECLARED_DROPPED", f"edge references undeclared step{missing}",
                    UndeclaredIdentifierError)
            continue
        edge = (remap[stmt.src], remap[stmt.dst])
        if kept.has_edge(*edge):
            if lenient:
                diagnostics.add(stmt.line, stmt.column, "DUP_EDGE", f"duplicate edge {edge} ignored")
            continue
        if edge[0] == edge[1] or nx.has_path(kept, edge[1], edge[0]):
            if not lenient:
                raise CycleViolationError(f"edge {edge} at line {stmt.line} creates a cycle", edge=edge)
            diagnostics.add(stmt.line, stmt.column, "CYCLE_DROPPED", f"edge {edge} creates a cycle, dropped")
            continue
        kept.add_edge(*edge)
        edge_lines[edge] = stmt

    reduced = transitive_reduction(len(events), kept.edges())
    if lenient:
        for edge in sorted(set(kept.edges()) - reduced):
            stmt = edge_lines[edge]
            diagnostics.add(stmt.line, stmt.column, "SHORTCUT_REDUCED", f"edge {edge} implied by a longer path")

    g = ScriptGraph(scenario, events, sorted(reduced))
    report = g.validate()
    if not report.ok:
        raise InvalidArgumentError(f"parsed graph is invalid: {report.codes}")
    return g


def parse_document(text: str, lenient: bool = False,
                   diagnostics: Optional[ParseDiagnostics] = None) -> DotDocument:
    return _DotParser(text, lenient, diagnostics or ParseDiagnostics()).parse()


def parse_script(text: str, scenario: Optional[str] = None, lenient: bool = False,
                 default_scenario: Optional[str] = None) -> ParseResult:
    """scenario 우선순위: 인자 > '// scenario' 주석 > default_scenario"""
    diagnostics = ParseDiagnostics()
    doc = parse_document(text, lenient, diagnostics)
    g = _build_graph(doc, scenario, lenient, diagnostics, default_scenario)
    if diagnostics.recovered:
        logger.warning(f"DOT input recovered with {len(diagnostics.warnings)} warning(s): "
                       f"{sorted(set(diagnostics.codes))}")
    return ParseResult(g, diagnostics, dict(doc.meta))


def parse_dot(text: str, scenario: Optional[str] = None) -> ScriptGraph:
    """정규 문법 strict 파싱 (간선은 reduction 후 검증)"""
    return parse_script(text, scenario, lenient=False).graph


def parse_lenient(text: str, scenario: Optional[str] = None) -> Tuple[ScriptGraph, ParseDiagnostics]:
    """모델 출력용 관대한 파싱. 사이클을 만드는 간선은 입력 순서상 나중 것을 버린다.

    scenario 가 없으면 UNTITLED_SCENARIO 로 대체하고 MISSING_SCENARIO 경고를 남긴다.
    digraph 헤더가 없을 때만 ParseFailureError.
    """
    result = parse_script(text, scenario, lenient=True)
    return result.graph, result.diagnostics


def emit_dot(g: ScriptGraph, include_durations: bool = True,
             meta: Optional[Dict[str, str]] = None) -> str:
    report = g.validate()
    if not report.ok:
        raise InvalidArgumentError(f"cannot emit invalid graph: {report.codes}")

    lines = ["digraph {"]
    for key in META_KEYS:
        if meta and meta.get(key):
            lines.append(f"// {key} {' '.join(str(meta[key]).split())}")
    for e in sorted(g.events, key=lambda ev: ev.id):
        lines.append(f'step{e.id} [label="{_escape(e.text)}"];')
        if include_durations and e.duration is not None:
            duration = f"// duration step{e.id} {e.duration.bucket}"
            if e.duration.seconds_estimate is not None:
                duration += f" {e.duration.seconds_estimate!r}"
            lines.append(duration)
    for src, dst in sorted(g.edges):
        lines.append(f"step{src} -> step{dst};")
    lines.append("}")
    return "\n".join(lines)
