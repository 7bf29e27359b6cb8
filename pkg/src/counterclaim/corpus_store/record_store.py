"""
On-disk record store for an ingested corpus.

Two files live in the store directory:

    records.bin   b"CCRC" + uint16 format version, then one entry per document:
                  uint32 little-endian length followed by the UTF-8 JSON record
    records.idx   artifact ("corpus-offsets") mapping doc_id -> byte offset,
                  stamped with the size of records.bin it was built from

The index is rebuilt from records.bin whenever it is missing or stale, so
records.bin alone is the source of truth.

Example:
    from counterclaim.corpus_store import CorpusStore, ingest_jsonl

    store = CorpusStore.write("artifacts/corpus", ingest_jsonl("articles.jsonl"))
    doc = store.get("PMC123")
"""

import json
import struct
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from counterclaim.logger import configure_logging
from counterclaim.storage import ArtifactFormatError, read_artifact, write_artifact

from .corpus_store import Corpus
from .errors.corpus_errors import CorpusStoreError
from .models.corpus_models import EvidenceDocument

log = configure_logging(__name__)

RECORDS_MAGIC = b"CCRC"
RECORDS_VERSION = 1
RECORDS_FILE = "records.bin"
INDEX_FILE = "records.idx"
INDEX_KIND = "corpus-offsets"
INDEX_VERSION = 1

_HEADER = struct.Struct("<4sH")
_LENGTH = struct.Struct("<I")


class CorpusStore:
    """
    Read access to a persisted corpus with O(1) lookup by doc_id.

    Every `get` opens the record file on its own, so one store instance can be
    shared by concurrent readers.

    Attributes:
        directory: Store directory
        doc_ids: Ids in ingest order
    """

    def __init__(self, directory: Union[str, Path], doc_ids: List[str], offsets: np.ndarray):
        self.directory = Path(directory)
        self.doc_ids = doc_ids
        self._offsets: Dict[str, int] = {doc_id: int(offset) for doc_id, offset in zip(doc_ids, offsets)}

    @property
    def records_path(self) -> Path:
        return self.directory / RECORDS_FILE

    def __len__(self) -> int:
        return len(self.doc_ids)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._offsets

    # ------------------ Writing ------------------ #
    @classmethod
    def write(cls, directory: Union[str, Path], corpus: Corpus) -> "CorpusStore":
        """
        Persist a corpus, replacing any previous store in the directory.

        Args:
            directory: Store directory (created if needed)
            corpus: Corpus to persist

        Returns:
            CorpusStore: Store opened on the written files
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        records_path = directory / RECORDS_FILE
        tmp_path = records_path.with_suffix(".bin.tmp")

        offsets = []
        with open(tmp_path, "wb") as handle:
            handle.write(_HEADER.pack(RECORDS_MAGIC, RECORDS_VERSION))
            for doc in corpus:
                payload = json.dumps(doc.to_record(), ensure_ascii=False, sort_keys=True).encode("utf-8")
                offsets.append(handle.tell())
                handle.write(_LENGTH.pack(len(payload)))
                handle.write(payload)
        tmp_path.replace(records_path)

        doc_ids = corpus.doc_ids
        offset_array = np.asarray(offsets, dtype=np.int64)
        cls._write_index(directory, doc_ids, offset_array, records_path.stat().st_size)
        log.success(f"Stored {len(doc_ids)} documents in {directory}")
        return cls(directory, doc_ids, offset_array)

    @staticmethod
    def _write_index(directory: Path, doc_ids: List[str], offsets: np.ndarray, records_size: int) -> None:
        write_artifact(
            directory / INDEX_FILE,
            kind=INDEX_KIND,
            version=INDEX_VERSION,
            metadata={"records_size": records_size, "count": len(doc_ids)},
            arrays={"doc_ids": np.asarray(doc_ids, dtype=np.str_), "offsets": offsets},
        )

    # ------------------ Opening ------------------ #
    @classmethod
    def open(cls, directory: Union[str, Path]) -> "CorpusStore":
        """
        Open an existing store, rebuilding records.idx if it is missing or stale.

        Raises:
            CorpusStoreError: If records.bin is missing or corrupt
        """
        directory = Path(directory)
        records_path = directory / RECORDS_FILE
        if not records_path.exists():
            raise CorpusStoreError(f"No record store at {directory}")
        records_size = records_path.stat().st_size

        try:
            metadata, arrays = read_artifact(directory / INDEX_FILE, INDEX_KIND, INDEX_VERSION)
            if metadata.get("records_size") == records_size:
                doc_ids = [str(doc_id) for doc_id in arrays["doc_ids"].tolist()]
                return cls(directory, doc_ids, arrays["offsets"])
            log.warning(f"{INDEX_FILE} is stale for {records_path}; rebuilding")
        except ArtifactFormatError as e:
            log.warning(f"Rebuilding {INDEX_FILE}: {e.message}")

        doc_ids, offsets = [], []
        for offset, record in _scan_records(records_path):
            doc_ids.append(str(record["id"]))
            offsets.append(offset)
        offset_array = np.asarray(offsets, dtype=np.int64)
        cls._write_index(directory, doc_ids, offset_array, records_size)
        return cls(directory, doc_ids, offset_array)

    # ------------------ Reading ------------------ #
    def get(self, doc_id: str) -> Optional[EvidenceDocument]:
        """Look up one document; None if the id is unknown."""
        offset = self._offsets.get(doc_id)
        if offset is None:
            return None
        with open(self.records_path, "rb") as handle:
            handle.seek(offset)
            return _document_from(_read_entry(handle, self.records_path))

    def require(self, doc_id: str) -> EvidenceDocument:
        """Like get, but raises CorpusStoreError for an unknown id."""
        doc = self.get(doc_id)
        if doc is None:
            raise CorpusStoreError(f"Unknown doc_id {doc_id!r}")
        return doc

    def load_corpus(self) -> Corpus:
        """Read every record back into an in-memory Corpus, in ingest order."""
        return Corpus(_document_from(record) for _, record in _scan_records(self.records_path))


def _document_from(record: dict) -> EvidenceDocument:
    return EvidenceDocument(
        doc_id=record["id"],
        title=record["title"],
        abstract=record["abstract"],
        source=record["source"],
        ingest_time=record["ingest_time"],
    )


def _read_entry(handle, path: Path) -> dict:
    prefix = handle.read(_LENGTH.size)
    if len(prefix) != _LENGTH.size:
        raise CorpusStoreError(f"{path} is truncated")
    (length,) = _LENGTH.unpack(prefix)
    payload = handle.read(length)
    if len(payload) != length:
        raise CorpusStoreError(f"{path} is truncated")
    try:
        return json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorpusStoreError(f"{path} holds a corrupt record: {e}") from e


def _scan_records(path: Path) -> Iterator[Tuple[int, dict]]:
    with open(path, "rb") as handle:
        header = handle.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise CorpusStoreError(f"{path} is too short to be a record store")
        magic, version = _HEADER.unpack(header)
        if magic != RECORDS_MAGIC:
            raise CorpusStoreError(f"{path} has bad magic {magic!r}")
        if version != RECORDS_VERSION:
            raise CorpusStoreError(f"{path} is record format v{version}, this build reads v{RECORDS_VERSION}")
        size = path.stat().st_size
        while handle.tell() < size:
            offset = handle.tell()
            yield offset, _read_entry(handle, path)
