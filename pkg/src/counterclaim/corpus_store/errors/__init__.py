from .corpus_errors import CorpusStoreError, IngestError

__all__ = ["IngestError", "CorpusStoreError"]
