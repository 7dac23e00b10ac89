"""
Codec Package - DOT 서브셋 직렬화
"""
from .dot_codec import (
    DotDocument, EdgeStmt, NodeStmt, ParseDiagnostics, ParseResult, ParseWarning,
    emit_dot, parse_document, parse_dot, parse_lenient, parse_script,
)

__all__ = [
    "DotDocument", "EdgeStmt", "NodeStmt", "ParseDiagnostics", "ParseResult", "ParseWarning",
    "emit_dot", "parse_document", "parse_dot", "parse_lenient", "parse_script",
]
