# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from pydantic import ValidationError

from .errors.corpus_errors import IngestError
from .models.corpus_models import EvidenceDocument, IngestReport

# ------------------ Constants ------------------ #
SEPARATOR = " [SEP] "
MAX_REPORTED_POSITIONS = 100

RawRecord = Union[str, bytes, Dict[str, Any]]


def evidence_text(doc: EvidenceDocument) -> str:
    """
    Text used to score and embed a document: title and abstract joined by " [SEP] ".

    Args:
        doc: A valid document

    Returns:
        str: e.g. "A [SEP] B", or "A [SEP] " when the abstract is empty
    """
    return f"{doc.title}{SEPARATOR}{doc.abstract}"


def dedup_key(title: str, abstract: str) -> Tuple[str, str]:
    """Lowercased, whitespace-collapsed (title, abstract) pair used for duplicate detection."""
    return (" ".join(title.lower().split()), " ".join(abstract.lower().split()))


class Corpus:
    """
    Ordered, immutable collection of evidence documents.

    Documents keep their ingest order; doc_index i in the lexical index refers
    to corpus[i]. Safe for concurrent readers once built.

    Attributes:
        documents: Documents in ingest order
        report: Counts from the ingest run that produced the corpus (None when
            built directly from documents)
    """

    def __init__(self, documents: Iterable[EvidenceDocument], report: Optional[IngestReport] = None):
        self.documents: Tuple[EvidenceDocument, ...] = tuple(documents)
        self.report = report
        self._positions: Dict[str, int] = {}
        seen_keys = set()
        for position, doc in enumerate(self.documents):
            if doc.doc_id in self._positions:
                raise ValueError(f"duplicate doc_id {doc.doc_id!r} in corpus")
            key = dedup_key(doc.title, doc.abstract)
            if key in seen_keys:
                raise ValueError(f"document {doc.doc_id!r} repeats the text of an earlier document")
            seen_keys.add(key)
            self._positions[doc.doc_id] = position

    @property
    def n(self) -> int:
        return len(self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[EvidenceDocument]:
        return iter(self.documents)

    def __getitem__(self, position: int) -> EvidenceDocument:
        return self.documents[position]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._positions

    @property
    def doc_ids(self) -> List[str]:
        return [doc.doc_id for doc in self.documents]

    def get(self, doc_id: str) -> Optional[EvidenceDocument]:
        position = self._positions.get(doc_id)
        return None if position is None else self.documents[position]

    def position_of(self, doc_id: str) -> int:
        """
        Index of a document in ingest order.

        Raises:
            KeyError: If the id is not in the corpus
        """
        return self._positions[doc_id]

    def texts(self) -> List[str]:
        """evidence_text of every document, in corpus order."""
        return [evidence_text(doc) for doc in self.documents]

    def to_records(self) -> List[dict]:
        """Re-serialize to the ingest record layout."""
        return [doc.to_record() for doc in self.documents]


def _decode_record(raw: RawRecord) -> Optional[Dict[str, Any]]:
    """Turn a raw record into a dict, or None if it cannot be decoded."""
    if isinstance(raw, dict):
        return raw
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError:
            return None
    try:
        decoded = json.loads(raw)
    except (json.JSONDecodeError, TypeError):
        return None
    return decoded if isinstance(decoded, dict) else None


def _encodable(text: str) -> bool:
    try:
        text.encode("utf-8")
    except UnicodeEncodeError:
        return False
    return True


def _to_document(record: Dict[str, Any], ingest_time: datetime) -> Optional[EvidenceDocument]:
    """Validate one decoded record. Returns None for anything invalid."""
    doc_id = record.get("id")
    if isinstance(doc_id, bool) or not isinstance(doc_id, (str, int)):
        return None
    doc_id = str(doc_id)
    title = record.get("title") or ""
    abstract = record.get("abstract") or ""
    source = record.get("source") or "unknown"
    if not all(isinstance(value, str) for value in (doc_id, title, abstract, source)):
        return None
    if not doc_id.strip() or not all(_encodable(value) for value in (doc_id, title, abstract, source)):
        return None

    fields = {
        "doc_id": doc_id,
        "title": title,
        "abstract": abstract,
        "source": source,
        "ingest_time": record.get("ingest_time") or ingest_time,
    }
    try:
        return EvidenceDocument(**fields)
    except ValidationError:
        return None


def ingest(records: Iterable[RawRecord]) -> Corpus:
    """
    Build a corpus from a stream of raw article records.

    Each record is a JSON line (str or bytes) or an already-decoded dict with
    keys id, title, abstract, source. A record is invalid when it cannot be
    decoded, has no id, has neither title nor abstract, or holds text that is
    not valid Unicode. A record is a duplicate when its id or its normalized
    (title, abstract) pair was already retained. Invalid and duplicate records
    are skipped and counted; blank lines are ignored.

    Args:
        records: Raw records, in order

    Returns:
        Corpus: The retained documents, with `report` filled in

    Raises:
        IngestError: If iterating the stream itself fails
    """
    log.step("Ingesting evidence records")
    ingest_time = datetime.now(timezone.utc)
    report = IngestReport()
    documents: List[EvidenceDocument] = []
    seen_ids = set()
    seen_keys = set()

    iterator = iter(records)
    position = 0
    while True:
        try:
            raw = next(iterator)
        except StopIteration:
            break
        except (OSError, UnicodeDecodeError) as e:
            raise IngestError(f"Input stream unreadable: {e}", position=position + 1) from e
        position += 1

        if isinstance(raw, (str, bytes)) and not raw.strip():
            continue
        report.total += 1

        decoded = _decode_record(raw)
        doc = _to_document(decoded, ingest_time) if decoded is not None else None
        if doc is None:
            report.invalid += 1
            if len(report.invalid_positions) < MAX_REPORTED_POSITIONS:
                report.invalid_positions.append(position)
            continue

        key = dedup_key(doc.title, doc.abstract)
        if doc.doc_id in seen_ids or key in seen_keys:
            report.duplicate += 1
            continue

        seen_ids.add(doc.doc_id)
        seen_keys.add(key)
        documents.append(doc)

    report.retained = len(documents)
    if report.invalid:
        log.warning(f"Skipped {report.invalid} invalid records (first positions: {report.invalid_positions[:10]})")
    if report.duplicate:
        log.warning(f"Skipped {report.duplicate} duplicate records")
    log.success(f"Ingested {report.retained} of {report.total} records")
    return Corpus(documents, report=report)


def read_jsonl_lines(path: Union[str, Path]) -> Iterator[bytes]:
    """
    Yield the raw lines of a JSON-lines file as bytes.

    Lines are yielded undecoded so a single bad line becomes an invalid record
    instead of a stream failure.

    Raises:
        IngestError: If the file cannot be opened or read
    """
    path = Path(path)
    position = 0
    try:
        with open(path, "rb") as handle:
            for line in handle:
                position += 1
                yield line
    except OSError as e:
        raise IngestError(f"Cannot read {path}: {e}", position=position + 1) from e


def ingest_jsonl(path: Union[str, Path]) -> Corpus:
    """Ingest a JSON-lines file of article records."""
    return ingest(read_jsonl_lines(path))
