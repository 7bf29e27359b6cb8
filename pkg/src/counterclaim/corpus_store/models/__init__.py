"""
Models for the corpus store.
"""

from .corpus_models import EvidenceDocument, IngestReport

__all__ = ["EvidenceDocument", "IngestReport"]
