"""
Settings for the CLI and the service.

Sources, lowest to highest precedence: model defaults, the TOML file given with
--config, environment variables (after .env is loaded), then command-line
flags. The artifact directory layout is fixed relative to `artifacts_dir`.

Example config.toml:

    artifacts_dir = "artifacts"
    seed = 7

    [pipeline]
    m = 20
    k_out = 5

    [backend]
    kind = "openai"
    url = "http://localhost:8001/v1"
    model = "counter-misinfo-7b"
"""

import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator

from counterclaim.dense_retriever import EmbeddingConfig, RetrieverTrainConfig
from counterclaim.lexical_retriever import Bm25Params
from counterclaim.policy_optimizer import PpoConfig, SftConfig
from counterclaim.reward_engine import ClassifierConfig

from .errors.orchestrator_errors import ConfigurationError
from .models.orchestrator_models import PromptTemplate

ENV_VARIABLES = {
    "COUNTERCLAIM_ARTIFACTS_DIR": ("artifacts_dir",),
    "COUNTERCLAIM_BACKEND_URL": ("backend", "url"),
    "COUNTERCLAIM_BACKEND_KIND": ("backend", "kind"),
    "COUNTERCLAIM_BACKEND_MODEL": ("backend", "model"),
    "OPENAI_API_KEY": ("backend", "api_key"),
}


class CorpusSettings(BaseModel):
    store_dir: str = "corpus"


class IndexSettings(BaseModel):
    bm25: Bm25Params = Bm25Params()
    remove_stopwords: bool = True
    workers: int = Field(default=1, ge=1)
    file_name: str = "index.ccaf"


class RetrieverSettings(BaseModel):
    embedding: EmbeddingConfig = EmbeddingConfig()
    training: RetrieverTrainConfig = RetrieverTrainConfig()
    file_name: str = "scorer.ccaf"


class PipelineSettings(BaseModel):
    m: int = Field(default=20, ge=1)
    k_out: int = Field(default=5, ge=1)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _k_out_within_m(self) -> "PipelineSettings":
        if self.k_out > self.m:
            raise ValueError(f"k_out ({self.k_out}) must not exceed m ({self.m})")
        return self


class RewardSettings(BaseModel):
    alpha: float = Field(default=0.5, ge=0.0)
    raw_relevance: bool = False
    classifier: ClassifierConfig = ClassifierConfig()
    classifier_dir: str = "classifiers"


class PolicySettings(BaseModel):
    max_length: int = Field(default=32, ge=1)
    context_buckets: int = Field(default=16, ge=1)
    sft: SftConfig = SftConfig()
    ppo: PpoConfig = PpoConfig()
    rollout_workers: int = Field(default=1, ge=1)
    reference_file: str = "reference_policy.ccaf"
    actor_file: str = "policy.ccaf"


class BackendKind(str, Enum):
    HTTP = "http"
    OPENAI = "openai"
    POLICY = "policy"
    STATIC = "static"


class BackendSettings(BaseModel):
    """
    Generation backend.

    Attributes:
        kind: Which backend to build
        url: Endpoint (http) or base URL (openai)
        model: Model name sent to an OpenAI-compatible server
        api_key: Key for an OpenAI-compatible server
        static_text: Reply of the static backend
        timeout: Seconds per attempt
        retries: Extra attempts after a timeout or transient failure
        backoff: First wait between attempts, doubled each time
        max_tokens: Generation length limit
        temperature: Sampling temperature, 0 for greedy
    """

    kind: BackendKind = BackendKind.POLICY
    url: Optional[str] = None
    model: str = "counterclaim"
    api_key: Optional[str] = Field(default=None, repr=False)
    static_text: str = ""
    timeout: float = Field(default=30.0, gt=0.0)
    retries: int = Field(default=2, ge=0)
    backoff: float = Field(default=0.5, ge=0.0)
    max_tokens: int = Field(default=256, ge=1)
    temperature: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _url_for_remote(self) -> "BackendSettings":
        if self.kind in (BackendKind.HTTP, BackendKind.OPENAI) and not self.url:
            raise ValueError(f"backend.url is required for the {self.kind.value} backend")
        return self


class ServiceSettings(BaseModel):
    host: str = "127.0.0.1"
    port: int = Field(default=8000, ge=1, le=65535)


class CounterclaimSettings(BaseModel):
    """
    Everything the CLI and the service are configured with.

    Attributes:
        artifacts_dir: Directory holding the corpus store and every checkpoint
        seed: Seed passed to every training and sampling step
        keep_logs: Also write JSON-lines logs under artifacts_dir/logs
    """

    artifacts_dir: Path = Path("artifacts")
    seed: int = 0
    keep_logs: bool = False
    corpus: CorpusSettings = CorpusSettings()
    index: IndexSettings = IndexSettings()
    retriever: RetrieverSettings = RetrieverSettings()
    pipeline: PipelineSettings = PipelineSettings()
    reward: RewardSettings = RewardSettings()
    policy: PolicySettings = PolicySettings()
    backend: BackendSettings = BackendSettings()
    service: ServiceSettings = ServiceSettings()
    prompt: PromptTemplate = PromptTemplate()

    # ------------------ Artifact layout ------------------ #
    @property
    def corpus_dir(self) -> Path:
        return self.artifacts_dir / self.corpus.store_dir

    @property
    def index_path(self) -> Path:
        return self.artifacts_dir / self.index.file_name

    @property
    def scorer_path(self) -> Path:
        return self.artifacts_dir / self.retriever.file_name

    @property
    def classifier_dir(self) -> Path:
        return self.artifacts_dir / self.reward.classifier_dir

    @property
    def reference_path(self) -> Path:
        return self.artifacts_dir / self.policy.reference_file

    @property
    def actor_path(self) -> Path:
        return self.artifacts_dir / self.policy.actor_file

    @property
    def reports_dir(self) -> Path:
        return self.artifacts_dir / "reports"

    # ------------------ Seeded configs ------------------ #
    def retriever_training(self) -> RetrieverTrainConfig:
        return self.retriever.training.model_copy(update={"seed": self.seed})

    def sft_config(self) -> SftConfig:
        return self.policy.sft.model_copy(update={"seed": self.seed})

    def ppo_config(self) -> PpoConfig:
        return self.policy.ppo.model_copy(update={"seed": self.seed})

    def classifier_config(self) -> ClassifierConfig:
        return self.reward.classifier.model_copy(update={"seed": self.seed})


def deep_merge(base: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively merge overrides into a copy of base; None values in overrides are ignored."""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping):
            current = merged.get(key)
            merged[key] = deep_merge(current if isinstance(current, Mapping) else {}, value)
        else:
            merged[key] = value
    return merged


def _environment_overrides(environ: Mapping[str, str]) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    for variable, path in ENV_VARIABLES.items():
        value = environ.get(variable)
        if not value:
            continue
        target = overrides
        for part in path[:-1]:
            target = target.setdefault(part, {})
        target[path[-1]] = value
    return overrides


def load_settings(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> CounterclaimSettings:
    """
    Build settings from defaults, a TOML file, the environment and overrides.

    Args:
        config_path: TOML file; None skips it
        overrides: Nested values from command-line flags; None entries are ignored
        environ: Environment to read; None loads .env and uses os.environ

    Returns:
        CounterclaimSettings: Validated settings

    Raises:
        ConfigurationError: If the file is missing or unreadable, or a value is invalid
    """
    if environ is None:
        load_dotenv()
        environ = os.environ

    values: Dict[str, Any] = {}
    if config_path is not None:
        path = Path(config_path)
        try:
            with open(path, "rb") as handle:
                values = tomllib.load(handle)
        except FileNotFoundError as e:
            raise ConfigurationError(f"Config file {path} not found") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigurationError(f"Config file {path} is not valid TOML: {e}") from e

    values = deep_merge(values, _environment_overrides(environ))
    values = deep_merge(values, overrides or {})
    try:
        return CounterclaimSettings.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'settings'}: {error['msg']}" for error in e.errors()
        )
        raise ConfigurationError(f"Invalid settings: {problems}") from e
