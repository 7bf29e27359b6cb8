"""
Command-line entry point.

    counterclaim ingest --input records.jsonl
    counterclaim index
    counterclaim search --claim "..." [--k 5] [--lexical]
    counterclaim train-retriever --train train.jsonl [--validation val.jsonl --sweep]
    counterclaim eval-retrieval --examples eval.jsonl [--compare]
    counterclaim train-reward --feedback feedback.jsonl
    counterclaim sft (--demonstrations demos.jsonl | --toy)
    counterclaim align (--prompts prompts.jsonl | --toy)
    counterclaim respond --claim "..."
    counterclaim serve [--host 0.0.0.0 --port 8000]

Every command accepts --config, --seed and --artifacts. Exit codes: 0 success,
1 usage error, 2 data error, 3 backend error.
"""

# ------------------ Configure Logging ------------------ #
from counterclaim.logger import attach_run_context, configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import argparse
import json
import logging
import sys
import uuid
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Type, TypeVar

import uvicorn
from pydantic import BaseModel, ValidationError

from counterclaim.corpus_store import CorpusStore, evidence_text, ingest_jsonl
from counterclaim.dense_retriever import DenseScorer, RetrieverExample, save_scorer, train
from counterclaim.errors import CounterclaimError, UsageError
from counterclaim.lexical_retriever import build_index, load_index, retrieve_top_m, save_index
from counterclaim.policy_optimizer import (
    BigramPolicy,
    Demonstration,
    PolicyPrompt,
    align,
    build_vocabulary,
    load_policy,
    load_toy,
    save_curve,
    save_policy,
    save_toy,
    supervised_finetune,
    toy_environment,
    toy_ppo_config,
    toy_reference,
    toy_sft_config,
)
from counterclaim.retrieval_pipeline import (
    compare_methods,
    evaluate,
    format_report_table,
    load_eval_examples,
    report_to_json,
    select_retriever,
    sweep_table,
)
from counterclaim.reward_engine import (
    Aspect,
    ClassifierTrainingError,
    RewardModel,
    format_metrics_table,
    load_feedback,
    save_classifiers,
    train_classifier,
)
from counterclaim.storage import ArtifactLock

from .app import create_app
from .errors.orchestrator_errors import InputDataError, ResponseGenerationError
from .models.orchestrator_models import PromptContext, RetrieveResponse
from .prompt import prompt_renderer
from .service import (
    CounterclaimService,
    load_corpus,
    load_retrieval,
    load_reward,
    require_artifact,
    retrieve_documents,
)
from .settings import CounterclaimSettings, load_settings

M = TypeVar("M", bound=BaseModel)
Handler = Callable[[argparse.Namespace, CounterclaimSettings], int]


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose errors exit through UsageError (code 1)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_jsonl_models(path: Path, model: Type[M]) -> List[M]:
    """Validate every non-blank line of a JSON-lines file as `model`; malformed lines are skipped."""
    items, skipped = [], 0
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                try:
                    items.append(model.model_validate_json(line))
                except ValidationError:
                    skipped += 1
    except (OSError, UnicodeDecodeError) as e:
        raise InputDataError(f"Cannot read {path}: {e}") from e
    if skipped:
        log.warning(f"Skipped {skipped} malformed lines in {path}")
    if not items:
        raise InputDataError(f"{path} holds no valid {model.__name__} records")
    return items


def emit(payload: str) -> None:
    print(payload, flush=True)


# ------------------ Corpus and index ------------------ #
def cmd_ingest(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    corpus = ingest_jsonl(args.input)
    with ArtifactLock(settings.artifacts_dir):
        CorpusStore.write(settings.corpus_dir, corpus)
    emit(corpus.report.model_dump_json())
    return 0


def cmd_index(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    corpus = load_corpus(settings)
    with ArtifactLock(settings.artifacts_dir):
        index = build_index(
            corpus, settings.index.bm25, remove_stopwords=settings.index.remove_stopwords, workers=settings.index.workers
        )
        save_index(index, settings.index_path)
    emit(json.dumps({"documents": index.doc_count, "terms": len(index.postings), "path": str(settings.index_path)}))
    return 0


def cmd_search(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    if args.lexical:
        index = load_index(require_artifact(settings.index_path, "index"))
        documents = retrieve_top_m(index, args.claim, args.k or settings.pipeline.k_out)
    else:
        documents = retrieve_documents(load_retrieval(settings), args.claim, args.k)
    emit(RetrieveResponse(claim=args.claim, documents=documents).model_dump_json())
    return 0


# ------------------ Retriever ------------------ #
def cmd_train_retriever(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    corpus = load_corpus(settings)
    index = load_index(require_artifact(settings.index_path, "index"))
    examples = [RetrieverExample(claim=e.claim, gold_doc_id=e.gold_doc_id) for e in load_eval_examples(args.train)]
    with ArtifactLock(settings.artifacts_dir):
        if args.sweep:
            if not args.validation:
                raise UsageError("--sweep needs --validation examples to select on")
            base = settings.retriever_training()
            scorer, rows = select_retriever(
                corpus,
                index,
                examples,
                load_eval_examples(args.validation),
                embedding_config=settings.retriever.embedding,
                base_config=base,
                learning_rates=(base.learning_rate,),
                m=settings.pipeline.m,
            )
            settings.reports_dir.mkdir(parents=True, exist_ok=True)
            sweep_table(rows).to_csv(settings.reports_dir / "retriever_sweep.csv", index=False)
        else:
            scorer, trace = train(
                DenseScorer(settings.retriever.embedding), examples, index, corpus, settings.retriever_training()
            )
            emit(trace.model_dump_json())
        save_scorer(scorer, settings.scorer_path)
    return 0


def cmd_eval_retrieval(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    pipeline = load_retrieval(settings)
    examples = load_eval_examples(args.examples)
    if args.compare:
        reports = compare_methods(pipeline, examples)
    else:
        reports = {"two_stage": evaluate(pipeline, examples, workers=settings.pipeline.workers)}
    settings.reports_dir.mkdir(parents=True, exist_ok=True)
    for name, report in reports.items():
        (settings.reports_dir / f"retrieval_{name}.json").write_text(report_to_json(report), encoding="utf-8")
    emit(format_report_table(reports))
    return 0


# ------------------ Reward ------------------ #
def cmd_train_reward(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    feedback = load_feedback(args.feedback)
    by_aspect = {aspect: [example for example in feedback if example.aspect == aspect] for aspect in Aspect}
    for aspect, selected in by_aspect.items():
        if not selected:
            log.warning(f"No {aspect.value} feedback in {args.feedback}; skipping that classifier")
    if not any(by_aspect.values()):
        raise ClassifierTrainingError(f"{args.feedback} has no feedback for any aspect")
    classifiers, metrics = {}, []
    with ArtifactLock(settings.artifacts_dir):
        for aspect, selected in by_aspect.items():
            if selected:
                classifiers[aspect], aspect_metrics = train_classifier(selected, aspect, settings.classifier_config())
                metrics.append(aspect_metrics)
        save_classifiers(classifiers, settings.classifier_dir)
    settings.reports_dir.mkdir(parents=True, exist_ok=True)
    (settings.reports_dir / "reward_metrics.json").write_text(
        json.dumps([m.model_dump(mode="json") for m in metrics], indent=2), encoding="utf-8"
    )
    emit(format_metrics_table(metrics))
    return 0


# ------------------ Policy ------------------ #
def with_evidence(items: Sequence[Any], settings: CounterclaimSettings) -> list:
    """Fill in retrieved evidence texts for items (claim/evidence models) that carry none."""
    if all(item.evidence for item in items):
        return list(items)
    pipeline = load_retrieval(settings)
    filled = []
    for item in items:
        if not item.evidence:
            documents = retrieve_documents(pipeline, item.claim)
            texts = [evidence_text(pipeline.corpus.get(doc.doc_id)) for doc in documents]
            item = item.model_copy(update={"evidence": texts})
        filled.append(item)
    return filled


def toy_dir(settings: CounterclaimSettings) -> Path:
    return settings.artifacts_dir / "toy"


def cmd_sft(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    with ArtifactLock(settings.artifacts_dir):
        if args.toy:
            env = toy_environment()
            reference = toy_reference(env, toy_sft_config(settings.seed))
            save_toy(env, toy_dir(settings) / "toy.json")
            save_policy(reference, toy_dir(settings) / settings.policy.reference_file)
            emit(json.dumps({"expected_reward": env.expected_reward(reference), "optimum": env.optimum}))
            return 0

        demonstrations = with_evidence(read_jsonl_models(args.demonstrations, Demonstration), settings)
        policy = BigramPolicy(
            build_vocabulary([d.response for d in demonstrations]),
            max_length=settings.policy.max_length,
            context_buckets=settings.policy.context_buckets,
            seed=settings.seed,
        )
        reference, trace = supervised_finetune(
            policy, demonstrations, settings.sft_config(), prompt_renderer=prompt_renderer(settings.prompt)
        )
        save_policy(reference, settings.reference_path)
    emit(trace.model_dump_json())
    return 0


def cmd_align(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    with ArtifactLock(settings.artifacts_dir):
        if args.toy:
            directory = toy_dir(settings)
            env_path = directory / "toy.json"
            env = load_toy(env_path) if env_path.exists() else toy_environment()
            reference_path = directory / settings.policy.reference_file
            reference = (
                load_policy(reference_path)
                if reference_path.exists()
                else toy_reference(env, toy_sft_config(settings.seed))
            )
            config = toy_ppo_config(
                beta=settings.policy.ppo.beta, seed=settings.seed, iterations=args.iterations or 150
            )
            actor, curve = align(reference, env.prompts, env.reward, config)
            save_policy(actor, directory / settings.policy.actor_file)
            save_curve(curve, directory / "alignment_curve.csv")
            emit(
                json.dumps(
                    {
                        "expected_reward": env.expected_reward(actor),
                        "optimum": env.optimum,
                        "mean_kl": env.mean_kl(actor, reference),
                    }
                )
            )
            return 0

        reference = load_policy(require_artifact(settings.reference_path, "sft"))
        contexts = with_evidence(read_jsonl_models(args.prompts, PromptContext), settings)
        prompts = [PolicyPrompt(claim=c.claim, evidence=c.evidence) for c in contexts]
        pipeline = load_retrieval(settings)
        reward_config, classifiers = load_reward(settings, pipeline.scorer)
        actor, curve = align(
            reference,
            prompts,
            RewardModel(reward_config, classifiers),
            settings.ppo_config(),
            prompt_renderer=prompt_renderer(settings.prompt),
            workers=settings.policy.rollout_workers,
        )
        save_policy(actor, settings.actor_path)
        save_curve(curve, settings.reports_dir / "alignment_curve.csv")
    emit(curve.final.model_dump_json())
    return 0


# ------------------ Serving ------------------ #
def cmd_respond(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    service = CounterclaimService.from_settings(settings)
    try:
        emit(service.respond(args.claim).model_dump_json())
    except ResponseGenerationError as e:
        emit(RetrieveResponse(claim=e.claim, documents=e.evidence).model_dump_json())
        raise
    return 0


def cmd_serve(args: argparse.Namespace, settings: CounterclaimSettings) -> int:
    service = CounterclaimService.from_settings(settings)
    uvicorn.run(create_app(service), host=settings.service.host, port=settings.service.port)
    return 0


# ------------------ Parser ------------------ #
def build_parser() -> argparse.ArgumentParser:
    common = CliParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML settings file")
    common.add_argument("--seed", type=int, help="Seed for every training and sampling step")
    common.add_argument("--artifacts", type=Path, help="Artifact directory (default: artifacts)")
    common.add_argument("--keep-logs", action="store_true", default=None, help="Also write JSON-lines logs")

    parser = CliParser(prog="counterclaim", description="Evidence-grounded counter-misinformation responses")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = command("ingest", cmd_ingest, "Ingest JSON-lines evidence records into the corpus store")
    sub.add_argument("--input", type=Path, required=True)

    sub = command("index", cmd_index, "Build the BM25 index over the stored corpus")
    sub.add_argument("--k1", type=float)
    sub.add_argument("--b", type=float)
    sub.add_argument("--workers", type=int)

    sub = command("search", cmd_search, "Retrieve evidence for a claim")
    sub.add_argument("--claim", required=True)
    sub.add_argument("--k", type=int)
    sub.add_argument("--m", type=int)
    sub.add_argument("--lexical", action="store_true", help="BM25 only, no dense reranking")

    sub = command("train-retriever", cmd_train_retriever, "Train the dense scorer")
    sub.add_argument("--train", type=Path, required=True, help="JSON lines of {claim, gold_doc_id}")
    sub.add_argument("--validation", type=Path)
    sub.add_argument("--sweep", action="store_true", help="Select tau and lambda by NDCG@10 on --validation")

    sub = command("eval-retrieval", cmd_eval_retrieval, "Report NDCG@k / Recall@k")
    sub.add_argument("--examples", type=Path, required=True)
    sub.add_argument("--compare", action="store_true", help="Also evaluate TF-IDF, BM25-only and dense-only")

    sub = command("train-reward", cmd_train_reward, "Train the aspect classifiers of the reward")
    sub.add_argument("--feedback", type=Path, required=True)

    sub = command("sft", cmd_sft, "Fine-tune and freeze the reference policy")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--demonstrations", type=Path)
    source.add_argument("--toy", action="store_true", help="Use the built-in template environment")

    sub = command("align", cmd_align, "Align the policy to the reward with KL-regularized PPO")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--prompts", type=Path)
    source.add_argument("--toy", action="store_true", help="Use the built-in template environment")
    sub.add_argument("--beta", type=float)
    sub.add_argument("--iterations", type=int)

    sub = command("respond", cmd_respond, "Retrieve, generate and score a counter-response")
    sub.add_argument("--claim", required=True)
    sub.add_argument("--backend", choices=["http", "openai", "policy", "static"])

    sub = command("serve", cmd_serve, "Run the HTTP service")
    sub.add_argument("--host")
    sub.add_argument("--port", type=int)
    sub.add_argument("--backend", choices=["http", "openai", "policy", "static"])

    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    """Nested settings overrides from the parsed flags; unset flags stay None and are ignored."""

    def flag(name: str) -> Any:
        return getattr(args, name, None)

    return {
        "artifacts_dir": flag("artifacts"),
        "seed": flag("seed"),
        "keep_logs": flag("keep_logs"),
        "index": {"bm25": {"k1": flag("k1"), "b": flag("b")}, "workers": flag("workers")},
        "pipeline": {"m": flag("m")},
        "policy": {"ppo": {"beta": flag("beta"), "iterations": flag("iterations")}},
        "backend": {"kind": flag("backend")},
        "service": {"host": flag("host"), "port": flag("port")},
    }


def keep_logs(directory: Path) -> None:
    """Add the JSON-lines file handler to every counterclaim logger created so far."""
    for name in list(logging.Logger.manager.loggerDict):
        if name.startswith("counterclaim"):
            configure_logging(name, keep_logs=True, log_dir=directory)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, load settings and run one command.

    Returns:
        int: Process exit code
    """
    try:
        args = build_parser().parse_args(argv)
        settings = load_settings(args.config, overrides_from(args))
        if settings.keep_logs:
            keep_logs(settings.artifacts_dir / "logs")
        attach_run_context(uuid.uuid4().hex[:12], args.command)
        log.step(f"counterclaim {args.command} (artifacts {settings.artifacts_dir}, seed {settings.seed})")
        return args.handler(args, settings)
    except CounterclaimError as e:
        log.error(f"{type(e).__name__}: {e.message}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
