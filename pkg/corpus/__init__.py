"""
Corpus Package
"""
from .base import BaseReader, Corpus, CorpusRecord, QuarantinedRecord
from .jsonl import JsonlReader, dump_jsonl, load_jsonl
from .dot_dir import READER_MAP, DotDirReader, read_corpus, write_dot_dir
from .filters import FilterResult, agreement_f1, agreement_filter, passes_agreement
from .stats import CorpusStats, corpus_stats

__all__ = [
    "BaseReader", "Corpus", "CorpusRecord", "QuarantinedRecord",
    "JsonlReader", "DotDirReader", "READER_MAP",
    "load_jsonl", "dump_jsonl", "read_corpus", "write_dot_dir",
    "FilterResult", "agreement_f1", "agreement_filter", "passes_agreement",
    "CorpusStats", "corpus_stats",
]
