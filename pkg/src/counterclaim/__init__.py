"""counterclaim - Evidence retrieval and reward-aligned counter-responses to health misinformation."""

__version__ = "0.1.0"

# For convenient imports
from .logger import configure_logging
from .errors import BackendError, CounterclaimError, DataError, UsageError
from .corpus_store import Corpus, CorpusStore, ingest_jsonl
from .lexical_retriever import build_index, retrieve_top_m
from .dense_retriever import DenseScorer, train
from .retrieval_pipeline import PipelineConfig, evaluate, two_stage_retrieve
from .reward_engine import RewardModel, compute_reward, train_classifier
from .policy_optimizer import BigramPolicy, align, supervised_finetune
from .orchestrator import CounterclaimService, create_app, load_settings, render_prompt
