"""
Models for the lexical retriever.
"""

from .retrieval_models import Bm25Params, ScoredDocument, Stage

__all__ = ["Bm25Params", "ScoredDocument", "Stage"]
