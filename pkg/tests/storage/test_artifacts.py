"""
Tests for the artifact container and the directory lock.
"""

import os

import numpy as np
import pytest

from counterclaim.errors import DataError, UsageError
from counterclaim.storage import (
    MAGIC,
    ArtifactFormatError,
    ArtifactLock,
    ArtifactLockError,
    artifact_digest,
    read_artifact,
    write_artifact,
)


@pytest.fixture
def artifact(tmp_path):
    """A small artifact with metadata, a float matrix and a string array."""
    path = tmp_path / "scorer.ccaf"
    write_artifact(
        path,
        "dense-scorer",
        2,
        {"dim": 3, "init": "identity"},
        {"projection": np.eye(3, dtype=np.float32), "vocab": np.array(["w0", "w1"])},
    )
    return path


class TestArtifacts:
    def test_read_back(self, artifact):
        # Execute
        metadata, arrays = read_artifact(artifact, "dense-scorer", 2)

        # Verify
        assert metadata == {"dim": 3, "init": "identity"}
        np.testing.assert_array_equal(arrays["projection"], np.eye(3, dtype=np.float32))
        assert arrays["vocab"].tolist() == ["w0", "w1"]

    def test_file_starts_with_magic(self, artifact):
        assert artifact.read_bytes()[:4] == MAGIC

    def test_no_temporary_file_left(self, artifact):
        assert [p.name for p in artifact.parent.iterdir()] == ["scorer.ccaf"]

    def test_wrong_kind(self, artifact):
        with pytest.raises(ArtifactFormatError, match="expected 'inverted-index'"):
            read_artifact(artifact, "inverted-index")

    def test_wrong_version(self, artifact):
        with pytest.raises(ArtifactFormatError, match="v2"):
            read_artifact(artifact, "dense-scorer", 3)

    def test_any_version_accepted_when_unspecified(self, artifact):
        metadata, _ = read_artifact(artifact, "dense-scorer")

        assert metadata["dim"] == 3

    def test_foreign_file(self, tmp_path):
        path = tmp_path / "notes.txt"
        path.write_bytes(b"plain text, not an artifact")

        with pytest.raises(ArtifactFormatError, match="bad magic"):
            read_artifact(path, "dense-scorer")

    def test_truncated_payload(self, artifact):
        artifact.write_bytes(artifact.read_bytes()[:-20])

        with pytest.raises(ArtifactFormatError):
            read_artifact(artifact, "dense-scorer")

    def test_missing_file_is_a_data_error(self, tmp_path):
        with pytest.raises(DataError):
            read_artifact(tmp_path / "absent.ccaf", "dense-scorer")

    def test_digest_is_stable_and_content_sensitive(self, tmp_path, artifact):
        # Setup
        other = tmp_path / "other.ccaf"
        write_artifact(other, "dense-scorer", 2, {"dim": 4}, {"projection": np.eye(4)})

        # Verify
        assert artifact_digest(artifact) == artifact_digest(artifact)
        assert len(artifact_digest(artifact)) == 64
        assert artifact_digest(artifact) != artifact_digest(other)


class TestArtifactLock:
    def test_lock_file_holds_pid_and_is_removed(self, tmp_path):
        with ArtifactLock(tmp_path) as lock:
            assert lock.path.read_text(encoding="utf-8") == str(os.getpid())

        assert not (tmp_path / ".lock").exists()

    def test_second_holder_rejected(self, tmp_path):
        with ArtifactLock(tmp_path):
            with pytest.raises(ArtifactLockError) as info:
                ArtifactLock(tmp_path).acquire()

        assert isinstance(info.value, UsageError)
        assert info.value.exit_code == 1

    def test_released_on_error(self, tmp_path):
        with pytest.raises(RuntimeError):
            with ArtifactLock(tmp_path):
                raise RuntimeError("training failed")

        with ArtifactLock(tmp_path):
            pass

    def test_creates_missing_directory(self, tmp_path):
        directory = tmp_path / "fresh" / "artifacts"

        with ArtifactLock(directory):
            assert directory.is_dir()
