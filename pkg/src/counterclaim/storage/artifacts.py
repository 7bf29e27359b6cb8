"""
Versioned binary container for trained artifacts.

Layout of a file:

    b"CCAF"            4 bytes magic
    container version  uint16, little endian
    header length      uint32, little endian
    header             UTF-8 JSON: {"kind", "version", "metadata", "arrays"}
    payload            .npz archive of the named numpy arrays

Arrays are stored without pickling, so only numeric and fixed-width string
dtypes are accepted. Readers name the kind and version they expect and get an
ArtifactFormatError for anything else.
"""

import io
import json
import hashlib
import struct
import zipfile
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from counterclaim.errors import DataError
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

MAGIC = b"CCAF"
CONTAINER_VERSION = 1
_PREFIX = struct.Struct("<4sHI")


class ArtifactFormatError(DataError):
    """Raised when a file is not a readable artifact of the expected kind and version."""

    error_code = "artifact_format_error"


def write_artifact(
    path: Union[str, Path],
    kind: str,
    version: int,
    metadata: Dict[str, Any],
    arrays: Dict[str, np.ndarray],
) -> Path:
    """
    Write an artifact file, replacing any existing file atomically.

    Args:
        path: Destination file.
        kind: Artifact kind, e.g. "inverted-index".
        version: Format version of that kind.
        metadata: JSON-serializable metadata.
        arrays: Named numpy arrays.

    Returns:
        Path: The written path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps(
        {"kind": kind, "version": version, "metadata": metadata, "arrays": sorted(arrays)},
        sort_keys=True,
    ).encode("utf-8")
    payload = io.BytesIO()
    np.savez(payload, **{name: np.asarray(value) for name, value in arrays.items()})

    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_path, "wb") as handle:
        handle.write(_PREFIX.pack(MAGIC, CONTAINER_VERSION, len(header)))
        handle.write(header)
        handle.write(payload.getvalue())
    tmp_path.replace(path)
    log.fine(f"Wrote {kind} v{version} artifact to {path}")
    return path


def read_artifact(
    path: Union[str, Path],
    kind: str,
    version: Optional[int] = None,
) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Read an artifact written by write_artifact.

    Args:
        path: Artifact file.
        kind: Expected kind.
        version: Expected version, or None to accept any.

    Returns:
        Tuple of (metadata, arrays).

    Raises:
        ArtifactFormatError: On a missing file, bad magic, or kind/version mismatch.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ArtifactFormatError(f"Cannot read artifact {path}: {e}") from e

    if len(raw) < _PREFIX.size:
        raise ArtifactFormatError(f"{path} is too short to be an artifact")
    magic, container_version, header_length = _PREFIX.unpack_from(raw)
    if magic != MAGIC:
        raise ArtifactFormatError(f"{path} has bad magic {magic!r}")
    if container_version != CONTAINER_VERSION:
        raise ArtifactFormatError(
            f"{path} uses container version {container_version}, expected {CONTAINER_VERSION}"
        )

    header_end = _PREFIX.size + header_length
    try:
        header = json.loads(raw[_PREFIX.size:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ArtifactFormatError(f"{path} has a corrupt header: {e}") from e
    if not isinstance(header, dict):
        raise ArtifactFormatError(f"{path} has a corrupt header")

    if header.get("kind") != kind:
        raise ArtifactFormatError(f"{path} holds a {header.get('kind')!r}, expected {kind!r}")
    if version is not None and header.get("version") != version:
        raise ArtifactFormatError(
            f"{path} is {kind} v{header.get('version')}, this build reads v{version}"
        )

    try:
        with np.load(io.BytesIO(raw[header_end:]), allow_pickle=False) as archive:
            arrays = {name: archive[name] for name in archive.files}
    except (OSError, ValueError, zipfile.BadZipFile) as e:
        raise ArtifactFormatError(f"{path} has a corrupt payload: {e}") from e
    return header.get("metadata", {}), arrays


def artifact_digest(path: Union[str, Path]) -> str:
    """Return the SHA-256 hex digest of a file."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
