"""
Tests for settings loading and precedence.
"""

from pathlib import Path

import pytest

from counterclaim.orchestrator import BackendKind, ConfigurationError, load_settings
from counterclaim.orchestrator.settings import deep_merge


@pytest.fixture
def config_file(tmp_path):
    """TOML file setting the seed, k_out and an openai backend."""
    path = tmp_path / "config.toml"
    path.write_text(
        'artifacts_dir = "from-toml"\n'
        "seed = 7\n"
        "\n"
        "[pipeline]\n"
        "k_out = 3\n"
        "\n"
        "[backend]\n"
        'kind = "openai"\n'
        'url = "http://toml.local/v1"\n',
        encoding="utf-8",
    )
    return path


class TestLoadSettings:
    def test_defaults(self):
        settings = load_settings(environ={})

        assert settings.artifacts_dir == Path("artifacts")
        assert settings.pipeline.m == 20
        assert settings.pipeline.k_out == 5
        assert settings.backend.kind == BackendKind.POLICY
        assert settings.backend.retries == 2
        assert settings.index_path == Path("artifacts") / "index.ccaf"

    def test_toml_values(self, config_file):
        settings = load_settings(config_file, environ={})

        assert settings.seed == 7
        assert settings.pipeline.k_out == 3
        assert settings.pipeline.m == 20
        assert settings.backend.kind == BackendKind.OPENAI

    def test_environment_overrides_toml(self, config_file):
        # Setup
        environ = {"COUNTERCLAIM_ARTIFACTS_DIR": "from-env", "COUNTERCLAIM_BACKEND_URL": "http://env.local/v1"}

        # Execute
        settings = load_settings(config_file, environ=environ)

        # Verify
        assert settings.artifacts_dir == Path("from-env")
        assert settings.backend.url == "http://env.local/v1"
        assert settings.backend.kind == BackendKind.OPENAI

    def test_overrides_win_and_none_is_ignored(self, config_file):
        # Setup
        environ = {"COUNTERCLAIM_ARTIFACTS_DIR": "from-env"}
        overrides = {"artifacts_dir": "from-flag", "seed": None, "pipeline": {"k_out": 2, "workers": None}}

        # Execute
        settings = load_settings(config_file, overrides=overrides, environ=environ)

        # Verify
        assert settings.artifacts_dir == Path("from-flag")
        assert settings.seed == 7
        assert settings.pipeline.k_out == 2
        assert settings.pipeline.workers == 1

    def test_seed_flows_into_training_configs(self):
        settings = load_settings(overrides={"seed": 11}, environ={})

        assert settings.sft_config().seed == 11
        assert settings.ppo_config().seed == 11
        assert settings.retriever_training().seed == 11
        assert settings.classifier_config().seed == 11

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            load_settings(tmp_path / "absent.toml", environ={})

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("[pipeline\nm = ", encoding="utf-8")

        with pytest.raises(ConfigurationError, match="not valid TOML"):
            load_settings(path, environ={})

    def test_k_out_above_m(self):
        with pytest.raises(ConfigurationError, match="k_out"):
            load_settings(overrides={"pipeline": {"m": 3, "k_out": 4}}, environ={})

    def test_remote_backend_needs_url(self):
        with pytest.raises(ConfigurationError, match="backend.url"):
            load_settings(overrides={"backend": {"kind": "http"}}, environ={})

    def test_invalid_value_names_the_field(self):
        with pytest.raises(ConfigurationError) as info:
            load_settings(overrides={"backend": {"timeout": -1}}, environ={})

        assert "backend.timeout" in info.value.message
        assert info.value.exit_code == 1


class TestDeepMerge:
    def test_nested_merge_keeps_untouched_keys(self):
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 3}, {"a": {"y": 5}})

        assert merged == {"a": {"x": 1, "y": 5}, "b": 3}

    def test_none_inside_new_section_is_dropped(self):
        assert deep_merge({}, {"policy": {"ppo": {"beta": None}}}) == {"policy": {"ppo": {}}}
