"""Command-line surface for batch corpus processing.

Subcommands: extract-events, make-pretrain-data, summarize, bucket,
evaluate, selector-baseline. Option precedence is flags > config file >
defaults; --print-config dumps the resolved configuration and exits.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from . import eventx, pipeline, selector, summarizer
from .granularity import GranularityConfig, buckets_to_csv
from .textmetrics import MetricConfig

BACKEND_URL_ENV = "EVENTSUM_BACKEND_URL"

DEFAULT_LEVELS = "coarse:1:0.9,medium:3:0.9,fine:8:0.9"


@dataclass
class RunConfig:
    command: str = ""
    inputs: list = dataclasses.field(default_factory=list)
    corpus: Optional[str] = None
    patterns: Optional[str] = None
    output: Optional[str] = None
    backend: str = "oracle"
    backend_url: Optional[str] = None
    levels: str = DEFAULT_LEVELS
    lambda1: float = 1.0
    lambda2: float = 0.4
    num_sentences: int = 9
    event_fraction: float = 0.9
    stemming: bool = False
    rouge_variant: str = "f1"
    multi_ref: str = "max"
    granu_scorer: str = "exact-recall"
    embeddings: Optional[str] = None
    seed: int = 0
    max_mask_cap: int = 10
    mask_divisor: int = 3
    parallelism: int = 0  # 0 = logical cores
    level: Optional[str] = None
    outputs_path: Optional[str] = None
    k: int = 1

    def validate(self):
        if self.backend == "remote" and not self.backend_url:
            raise SystemExit("backend=remote requires --backend-url (or " + BACKEND_URL_ENV + ")")
        if self.granu_scorer == "embedding-recall" and not self.embeddings:
            raise SystemExit("embedding-recall requires --embeddings")

    def resolved_parallelism(self) -> int:
        return self.parallelism if self.parallelism > 0 else (os.cpu_count() or 1)


def _load_patterns(config: RunConfig):
    if config.patterns:
        return eventx.load_patterns(config.patterns)
    return eventx.default_patterns()


def _make_backend(config: RunConfig) -> summarizer.SummarizerBackend:
    if config.backend == "oracle":
        return summarizer.CachingBackend(summarizer.ExtractiveOracle())
    if config.backend == "remote":
        return summarizer.CachingBackend(
            summarizer.RemoteBackend(url=config.backend_url)  # type: ignore[arg-type]
        )
    raise SystemExit(f"unknown backend {config.backend!r}")


def _parse_levels(spec: str) -> list[pipeline.GranularityLevelSpec]:
    levels = []
    for chunk in spec.split(","):
        parts = chunk.strip().split(":")
        if len(parts) != 3:
            raise SystemExit(f"bad level spec {chunk!r}; expected name:k:fraction")
        levels.append(
            pipeline.GranularityLevelSpec(
                name=parts[0], num_sentences=int(parts[1]), event_fraction=float(parts[2])
            )
        )
    return levels


def _metric_config(config: RunConfig) -> MetricConfig:
    return MetricConfig(stemming=config.stemming, rouge_variant=config.rouge_variant)


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _finish(errors: list[dict]) -> int:
    if errors:
        json.dump({"errors": errors}, sys.stderr, ensure_ascii=False)
        sys.stderr.write("\n")
        return 1
    return 0


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_extract_events(config: RunConfig) -> int:
    patterns = _load_patterns(config)
    if not patterns:
        print("warning: empty pattern file, no events will be extracted", file=sys.stderr)
    chunks = []
    errors: list[dict] = []
    for path in config.inputs:
        try:
            parsed = eventx.load_conllu(path)
        except (OSError, eventx.ConlluError) as exc:
            errors.append({"input": path, "error": str(exc)})
            continue
        for warning in parsed.warnings:
            print(f"warning: {path}: {warning}", file=sys.stderr)
        for doc in parsed.documents:
            events = eventx.extract_document_events(doc, patterns)
            chunks.append(eventx.events_to_jsonl(doc.id, events))
    _write(config.output, "".join(chunks))
    return _finish(errors)


def cmd_make_pretrain_data(config: RunConfig) -> int:
    patterns = _load_patterns(config)
    pretrain = summarizer.PretrainConfig(
        max_mask_cap=config.max_mask_cap,
        mask_fraction_divisor=config.mask_divisor,
        seed=config.seed,
    )
    chunks = []
    total = skipped = 0
    errors: list[dict] = []
    for path in config.inputs:
        try:
            parsed = eventx.load_conllu(path)
        except (OSError, eventx.ConlluError) as exc:
            errors.append({"input": path, "error": str(exc)})
            continue
        for doc in parsed.documents:
            samples = summarizer.make_pretrain_samples(doc, patterns, pretrain)
            if not samples:
                skipped += 1
                continue
            total += len(samples)
            chunks.append(summarizer.pretrain_samples_to_jsonl(samples))
    _write(config.output, "".join(chunks))
    print(f"wrote {total} samples; {skipped} documents had no events", file=sys.stderr)
    return _finish(errors)


def cmd_summarize(config: RunConfig) -> int:
    config.validate()
    patterns = _load_patterns(config)
    backend = _make_backend(config)
    levels = _parse_levels(config.levels)
    metrics = _metric_config(config)
    samples = pipeline.load_corpus(config.corpus)  # type: ignore[arg-type]
    errors: list[dict] = []

    def run(sample: pipeline.CorpusSample):
        return pipeline.summarize_multi_granularity(
            sample.doc, levels, backend, patterns, metrics,
            lambda1=config.lambda1, lambda2=config.lambda2,
        )

    with ThreadPoolExecutor(max_workers=config.resolved_parallelism()) as pool:
        results = list(pool.map(run, samples))
    lines = []
    for sample, result in sorted(zip(samples, results), key=lambda pair: pair[0].id):
        row = {
            "id": sample.id,
            "levels": [
                {
                    "name": lr.level.name,
                    "num_sentences": lr.level.num_sentences,
                    "event_fraction": lr.level.event_fraction,
                    "summary": lr.summary.text if lr.summary else None,
                    "events": list(lr.events_used),
                    "error": lr.error,
                }
                for lr in result.levels
            ],
        }
        for lr in result.levels:
            if lr.error:
                errors.append({"id": sample.id, "level": lr.level.name, "error": lr.error})
        lines.append(json.dumps(row, ensure_ascii=False))
    _write(config.output, "\n".join(lines) + ("\n" if lines else ""))
    return _finish(errors)


def cmd_bucket(config: RunConfig) -> int:
    config.validate()
    patterns = _load_patterns(config)
    granu = GranularityConfig(scorer=config.granu_scorer, embedding_source=config.embeddings)
    corpus = pipeline.load_corpus(config.corpus)  # type: ignore[arg-type]
    scores = []
    errors: list[dict] = []
    for sample in corpus:
        if sample.reference_doc is None:
            errors.append({"id": sample.id, "error": "no references_conllu_path for bucket scoring"})
            continue
        try:
            from .granularity import event_sequence, granu_score
            score = granu_score(
                event_sequence(sample.doc, patterns),
                event_sequence(sample.reference_doc, patterns),
                granu,
            )
        except Exception as exc:
            errors.append({"id": sample.id, "error": str(exc)})
            continue
        scores.append((sample.id, score))
    if scores:
        from .granularity import bucket_split
        assignments = bucket_split(scores)
        _write(config.output, buckets_to_csv(assignments))
    return _finish(errors)


def cmd_evaluate(config: RunConfig) -> int:
    corpus = pipeline.load_corpus(config.corpus)  # type: ignore[arg-type]
    metrics = _metric_config(config)
    outputs = []
    errors: list[dict] = []
    with open(config.outputs_path, encoding="utf-8") as fh:  # type: ignore[arg-type]
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if "levels" in row:
                if not config.level:
                    raise SystemExit("multi-level outputs need --level to pick one")
                match = [lv for lv in row["levels"] if lv["name"] == config.level]
                if not match or match[0]["summary"] is None:
                    errors.append({"id": row["id"], "error": f"no summary for level {config.level}"})
                    continue
                outputs.append((row["id"], match[0]["summary"]))
            else:
                outputs.append((row["id"], row["summary"]))
    references = []
    for sample in corpus:
        refs = sample.references
        if config.level and sample.named_references and config.level in sample.named_references:
            refs = (sample.named_references[config.level],)
        references.append((sample.id, refs))
    report = pipeline.evaluate_rouge(outputs, references, metrics, multi_ref=config.multi_ref)
    if config.output:
        base, _ = os.path.splitext(config.output)
        _write(base + ".csv", report.to_csv())
        _write(base + ".txt", report.to_table())
    else:
        sys.stdout.write(report.to_table())
    return _finish(errors)


def cmd_selector_baseline(config: RunConfig) -> int:
    corpus = pipeline.load_corpus(config.corpus)  # type: ignore[arg-type]
    metrics = _metric_config(config)
    errors: list[dict] = []
    lines = []

    def run(sample: pipeline.CorpusSample):
        return pipeline.selector_baseline(
            sample.doc, config.k, metrics, lambda1=config.lambda1, lambda2=config.lambda2
        )

    with ThreadPoolExecutor(max_workers=config.resolved_parallelism()) as pool:
        results = list(pool.map(run, corpus))
    for sample, summary in sorted(zip(corpus, results), key=lambda pair: pair[0].id):
        lines.append(json.dumps({"id": sample.id, "summary": summary.text}, ensure_ascii=False))
    _write(config.output, "\n".join(lines) + ("\n" if lines else ""))
    return _finish(errors)


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

_COMMANDS = {
    "extract-events": cmd_extract_events,
    "make-pretrain-data": cmd_make_pretrain_data,
    "summarize": cmd_summarize,
    "bucket": cmd_bucket,
    "evaluate": cmd_evaluate,
    "selector-baseline": cmd_selector_baseline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eventsum")
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--print-config", action="store_true", help="dump resolved config and exit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--patterns", default=None, help="pattern DSL file (default: built-in)")
        p.add_argument("--output", default=None, help="output path ('-' = stdout)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--parallelism", type=int, default=None)
        return p

    p = add("extract-events", help="extract events from CoNLL-U files to JSONL")
    p.add_argument("inputs", nargs="+", help="CoNLL-U files")

    p = add("make-pretrain-data", help="build masked-sentence training samples")
    p.add_argument("inputs", nargs="+", help="CoNLL-U files")
    p.add_argument("--max-mask-cap", type=int, default=None)
    p.add_argument("--mask-divisor", type=int, default=None)

    p = add("summarize", help="multi-granularity summarization over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--backend", choices=["oracle", "remote"], default=None)
    p.add_argument("--backend-url", default=None)
    p.add_argument("--levels", default=None, help=f"name:k:fraction list (default {DEFAULT_LEVELS})")
    p.add_argument("--lambda1", type=float, default=None)
    p.add_argument("--lambda2", type=float, default=None)
    p.add_argument("--stemming", action="store_true", default=None)

    p = add("bucket", help="granularity-score a corpus and split into buckets")
    p.add_argument("--corpus", required=True)
    p.add_argument("--granu-scorer", choices=["exact-recall", "embedding-recall"], default=None)
    p.add_argument("--embeddings", default=None, help="token-embedding JSONL for embedding-recall")

    p = add("evaluate", help="ROUGE-evaluate outputs against corpus references")
    p.add_argument("--corpus", required=True)
    p.add_argument("--outputs", dest="outputs_path", required=True, help="outputs JSONL")
    p.add_argument("--level", default=None, help="level name for multi-level outputs")
    p.add_argument("--multi-ref", choices=["max", "mean"], default=None)
    p.add_argument("--stemming", action="store_true", default=None)
    p.add_argument("--no-stemming", dest="stemming", action="store_false")

    p = add("selector-baseline", help="extractive importance-score baseline")
    p.add_argument("--corpus", required=True)
    p.add_argument("-k", type=int, default=None, help="number of sentences to extract")

    return parser


def resolve_config(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig()
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            for key, value in json.load(fh).items():
                if not hasattr(config, key):
                    raise SystemExit(f"unknown config key {key!r}")
                setattr(config, key, value)
    for key, value in vars(args).items():
        if key in ("config", "print_config") or value is None:
            continue
        if hasattr(config, key):
            setattr(config, key, value)
    # evaluate defaults to the standard stemmed setup unless told otherwise
    if args.command == "evaluate" and getattr(args, "stemming", None) is None and not args.config:
        config.stemming = True
    if config.backend_url is None:
        config.backend_url = os.environ.get(BACKEND_URL_ENV)
    config.command = args.command
    config._print_config = args.print_config  # type: ignore[attr-defined]
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = resolve_config(list(argv) if argv is not None else sys.argv[1:])
    if getattr(config, "_print_config", False):
        payload = {k: v for k, v in dataclasses.asdict(config).items()}
        json.dump(payload, sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")
        return 0
    return _COMMANDS[config.command](config)


if __name__ == "__main__":
    sys.exit(main())
