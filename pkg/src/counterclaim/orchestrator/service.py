"""
The shared execution path of the CLI and the HTTP service.

claim -> two-stage retrieval -> prompt -> backend (with retries) -> reward.

A CounterclaimService only reads its loaded artifacts, so one instance can
answer concurrent requests.
"""

# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from counterclaim import __version__
from counterclaim.corpus_store import Corpus, CorpusStore, evidence_text
from counterclaim.corpus_store.record_store import RECORDS_FILE
from counterclaim.dense_retriever import DenseScorer, load_scorer
from counterclaim.errors import BackendError
from counterclaim.lexical_retriever import ScoredDocument, load_index
from counterclaim.policy_optimizer import load_policy
from counterclaim.retrieval_pipeline import PipelineConfig, rank_candidates
from counterclaim.reward_engine import (
    Aspect,
    AspectScorer,
    FeedbackClassifier,
    RewardConfig,
    compute_reward,
    load_classifiers,
)
from counterclaim.storage import artifact_digest

from .backends import (
    GenerationBackend,
    HttpGenerationBackend,
    OpenAICompatibleBackend,
    PolicyBackend,
    StaticBackend,
    generate_with_retry,
)
from .errors.orchestrator_errors import (
    ArtifactMissingError,
    BackendTimeoutError,
    InvalidRequestError,
    ResponseGenerationError,
)
from .models.orchestrator_models import (
    CounterResponse,
    GenerationRequest,
    HealthReport,
    PromptTemplate,
    Provenance,
)
from .prompt import render_prompt
from .settings import BackendKind, BackendSettings, CounterclaimSettings


def require_artifact(path: Path, command: str) -> Path:
    """Return path, or raise ArtifactMissingError naming the command that builds it."""
    if not path.exists():
        raise ArtifactMissingError(f"{path} not found; run `counterclaim {command}` first")
    return path


# ------------------ Loading ------------------ #
def load_corpus(settings: CounterclaimSettings) -> Corpus:
    require_artifact(settings.corpus_dir, "ingest")
    return CorpusStore.open(settings.corpus_dir).load_corpus()


def load_retrieval(settings: CounterclaimSettings, corpus: Optional[Corpus] = None) -> PipelineConfig:
    """Corpus, index and scorer from the artifact directory, bound into a PipelineConfig."""
    corpus = corpus or load_corpus(settings)
    index = load_index(require_artifact(settings.index_path, "index"))
    scorer = load_scorer(require_artifact(settings.scorer_path, "train-retriever"))
    return PipelineConfig(m=settings.pipeline.m, k_out=settings.pipeline.k_out, scorer=scorer, index=index, corpus=corpus)


def load_reward(
    settings: CounterclaimSettings, scorer: DenseScorer
) -> Tuple[RewardConfig, Dict[Aspect, FeedbackClassifier]]:
    """(RewardConfig, classifiers); every aspect classifier must exist."""
    classifiers = load_classifiers(settings.classifier_dir)
    missing = [aspect.value for aspect in Aspect if aspect not in classifiers]
    if missing:
        raise ArtifactMissingError(
            f"No {', '.join(missing)} classifier in {settings.classifier_dir}; run `counterclaim train-reward` first"
        )
    config = RewardConfig(alpha=settings.reward.alpha, scorer=scorer, raw_relevance=settings.reward.raw_relevance)
    return config, classifiers


def build_backend(settings: CounterclaimSettings) -> GenerationBackend:
    """The configured backend; the policy backend prefers the aligned actor over the reference."""
    backend: BackendSettings = settings.backend
    if backend.kind == BackendKind.HTTP:
        return HttpGenerationBackend(backend.url)
    if backend.kind == BackendKind.OPENAI:
        return OpenAICompatibleBackend(backend.model, base_url=backend.url, api_key=backend.api_key)
    if backend.kind == BackendKind.STATIC:
        return StaticBackend(backend.static_text)
    if settings.actor_path.exists():
        return PolicyBackend(load_policy(settings.actor_path), name=settings.actor_path.name, seed=settings.seed)
    path = require_artifact(settings.reference_path, "sft")
    return PolicyBackend(load_policy(path), name=path.name, seed=settings.seed)


def artifact_digests(settings: CounterclaimSettings) -> Dict[str, str]:
    """SHA-256 of every artifact file present, keyed by its path under artifacts_dir."""
    candidates = [
        settings.corpus_dir / RECORDS_FILE,
        settings.index_path,
        settings.scorer_path,
        *sorted(settings.classifier_dir.glob("*.ccaf")),
        settings.reference_path,
        settings.actor_path,
    ]
    digests = {}
    for path in candidates:
        if path.exists():
            digests[path.relative_to(settings.artifacts_dir).as_posix()] = artifact_digest(path)
    return digests


def retrieve_documents(pipeline: PipelineConfig, claim: str, k: Optional[int] = None) -> List[ScoredDocument]:
    """
    The k best documents for a claim (k_out when k is None), as `search` and /retrieve return them.

    Raises:
        InvalidRequestError: If the claim is blank or k is outside [1, m]
        PipelineError: If the index does not match the corpus
    """
    if not claim.strip():
        raise InvalidRequestError("claim must not be blank")
    k = pipeline.k_out if k is None else k
    if not 1 <= k <= pipeline.m:
        raise InvalidRequestError(f"k must be between 1 and m={pipeline.m}, got {k}")
    return rank_candidates(pipeline, claim)[:k]


class CounterclaimService:
    """
    Retrieval, generation and scoring over loaded artifacts.

    Attributes:
        pipeline: Two-stage retrieval setup
        reward_config: Reward assembly settings
        classifiers: Aspect classifiers of the reward
        backend: Generation backend
        template: Prompt template
        generation: Timeout, retry and decoding settings
        artifacts: Loaded artifact digests reported by health()
    """

    def __init__(
        self,
        pipeline: PipelineConfig,
        reward_config: RewardConfig,
        classifiers: Mapping[Aspect, AspectScorer],
        backend: GenerationBackend,
        template: Optional[PromptTemplate] = None,
        generation: Optional[BackendSettings] = None,
        artifacts: Optional[Dict[str, str]] = None,
    ):
        self.pipeline = pipeline
        self.reward_config = reward_config
        self.classifiers = classifiers
        self.backend = backend
        self.template = template or PromptTemplate()
        self.generation = generation or BackendSettings(kind=BackendKind.STATIC)
        self.artifacts = artifacts or {}

    @classmethod
    def from_settings(
        cls, settings: CounterclaimSettings, backend: Optional[GenerationBackend] = None
    ) -> "CounterclaimService":
        """
        Load every artifact named by the settings.

        Raises:
            ArtifactMissingError: If an artifact has not been built
            ArtifactFormatError: If an artifact file is unreadable
        """
        pipeline = load_retrieval(settings)
        reward_config, classifiers = load_reward(settings, pipeline.scorer)
        backend = backend or build_backend(settings)
        service = cls(
            pipeline,
            reward_config,
            classifiers,
            backend,
            template=settings.prompt,
            generation=settings.backend,
            artifacts=artifact_digests(settings),
        )
        log.success(
            f"Loaded {len(pipeline.corpus)} documents, {len(service.artifacts)} artifacts, backend {backend.backend_id}"
        )
        return service

    # ------------------ Retrieval ------------------ #
    def retrieve(self, claim: str, k: Optional[int] = None) -> List[ScoredDocument]:
        """The k best documents for a claim (k_out when k is None); see retrieve_documents."""
        return retrieve_documents(self.pipeline, claim, k)

    def evidence_texts(self, documents: List[ScoredDocument]) -> List[str]:
        return [evidence_text(self.pipeline.corpus.get(doc.doc_id)) for doc in documents]

    # ------------------ Response ------------------ #
    def respond(self, claim: str) -> CounterResponse:
        """
        Retrieve evidence, generate a counter-response and score it.

        Raises:
            InvalidRequestError: If the claim is blank
            ResponseGenerationError: If the backend failed on every attempt; carries the evidence
        """
        documents = self.retrieve(claim)
        texts = self.evidence_texts(documents)
        request = GenerationRequest(
            prompt=render_prompt(self.template, claim, texts),
            max_tokens=self.generation.max_tokens,
            temperature=self.generation.temperature,
            timeout=self.generation.timeout,
        )
        try:
            generated, attempts = generate_with_retry(
                self.backend, request, retries=self.generation.retries, backoff=self.generation.backoff
            )
        except BackendError as e:
            raise ResponseGenerationError(
                f"No response generated: {e.message}",
                claim=claim,
                evidence=documents,
                timed_out=isinstance(e, BackendTimeoutError),
            ) from e

        reward = compute_reward(self.reward_config, self.classifiers, claim, texts, generated.text)
        log.fine(f"Responded via {generated.backend_id} in {attempts} attempt(s), reward {reward.total:.3f}")
        return CounterResponse(
            claim=claim,
            evidence=documents,
            evidence_texts=texts,
            response=generated.text,
            reward=reward,
            provenance=Provenance(
                backend_id=generated.backend_id,
                backend_latency_s=generated.latency_s,
                attempts=attempts,
                m=self.pipeline.m,
                k_out=self.pipeline.k_out,
            ),
        )

    def health(self) -> HealthReport:
        return HealthReport(version=__version__, artifacts=dict(self.artifacts), backend_id=self.backend.backend_id)
