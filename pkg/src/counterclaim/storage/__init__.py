"""
Artifact persistence shared by the retrieval, reward and policy modules.
"""

from .artifacts import (
    MAGIC,
    ArtifactFormatError,
    artifact_digest,
    read_artifact,
    write_artifact,
)
from .lock import ArtifactLock, ArtifactLockError

__all__ = [
    "MAGIC",
    "ArtifactFormatError",
    "artifact_digest",
    "read_artifact",
    "write_artifact",
    "ArtifactLock",
    "ArtifactLockError",
]
