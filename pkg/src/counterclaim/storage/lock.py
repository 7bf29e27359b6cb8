"""
Exclusive lock on an artifact directory.

Training commands write checkpoints into the artifact directory; only one of
them may run at a time. The lock is a `.lock` file created with O_EXCL and
holding the owner's pid.
"""

import os
from pathlib import Path
from typing import Union

from counterclaim.errors import UsageError
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

LOCK_NAME = ".lock"


class ArtifactLockError(UsageError):
    """Raised when another training command holds the artifact directory."""

    error_code = "artifact_locked"


class ArtifactLock:
    """
    Context manager holding `<directory>/.lock` for its lifetime.

    Example:
        with ArtifactLock(settings.artifacts_dir):
            train_and_save(...)
    """

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.path = self.directory / LOCK_NAME
        self._held = False

    def acquire(self) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as e:
            owner = self.path.read_text(encoding="utf-8").strip() if self.path.exists() else "?"
            raise ArtifactLockError(
                f"{self.directory} is locked by process {owner}; remove {self.path} if that process is gone"
            ) from e
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(str(os.getpid()))
        self._held = True
        log.debug(f"Acquired {self.path}")

    def release(self) -> None:
        if self._held:
            self.path.unlink(missing_ok=True)
            self._held = False
            log.debug(f"Released {self.path}")

    def __enter__(self) -> "ArtifactLock":
        self.acquire()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.release()
