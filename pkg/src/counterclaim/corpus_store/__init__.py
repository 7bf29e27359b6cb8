"""
Corpus store: ingest, validate, deduplicate and persist evidence documents.
"""

from .corpus_store import (
    SEPARATOR,
    Corpus,
    dedup_key,
    evidence_text,
    ingest,
    ingest_jsonl,
    read_jsonl_lines,
)
from .errors import CorpusStoreError, IngestError
from .models import EvidenceDocument, IngestReport
from .record_store import CorpusStore

__all__ = [
    "SEPARATOR",
    "Corpus",
    "CorpusStore",
    "EvidenceDocument",
    "IngestReport",
    "IngestError",
    "CorpusStoreError",
    "dedup_key",
    "evidence_text",
    "ingest",
    "ingest_jsonl",
    "read_jsonl_lines",
]
