"""
Models for the evidence corpus.

EvidenceDocument is the retrievable unit: one scientific article reduced to its
title and abstract. IngestReport carries the bookkeeping of one ingest run.
"""

from datetime import datetime, timezone
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class EvidenceDocument(BaseModel):
    """
    One scientific article's retrievable unit.

    Attributes:
        doc_id: Unique identifier within a corpus
        title: Article title, stored exactly as ingested
        abstract: Article abstract, stored exactly as ingested
        source: Label of the corpus the article came from (e.g. "cord", "litcovid")
        ingest_time: When the record was ingested (UTC)
    """

    model_config = ConfigDict(frozen=True)

    doc_id: str = Field(min_length=1)
    title: str = ""
    abstract: str = ""
    source: str = "unknown"
    ingest_time: datetime = Field(default_factory=_utc_now)

    @model_validator(mode="after")
    def _has_text(self) -> "EvidenceDocument":
        if not self.title.strip() and not self.abstract.strip():
            raise ValueError(f"document {self.doc_id!r} has neither title nor abstract")
        return self

    def to_record(self) -> dict:
        """
        Convert to the JSON-lines record layout accepted by ingest.

        Returns:
            dict: Keys id, title, abstract, source, ingest_time
        """
        return {
            "id": self.doc_id,
            "title": self.title,
            "abstract": self.abstract,
            "source": self.source,
            "ingest_time": self.ingest_time.isoformat(),
        }


class IngestReport(BaseModel):
    """
    Counts from one ingest run.

    Invariant: retained + invalid + duplicate == total.

    Attributes:
        total: Records read (blank lines are not records)
        retained: Records kept in the corpus
        invalid: Records rejected as malformed or empty
        duplicate: Records rejected as repeated id or repeated normalized text
        invalid_positions: 1-based positions of the first rejected-invalid records
    """

    total: int = 0
    retained: int = 0
    invalid: int = 0
    duplicate: int = 0
    invalid_positions: List[int] = Field(default_factory=list)
