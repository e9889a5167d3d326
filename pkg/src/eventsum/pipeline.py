"""End-to-end orchestration: multi-granularity generation, ROUGE
evaluation, bucket-based evaluation, and the extractive selector
baseline.

Multi-document inputs are concatenated into one document before any
scoring. Each granularity level runs its own prune + rank pass; a shared
generation cache deduplicates identical backend requests across levels.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .eventx import (
    EventPattern,
    ParsedDocument,
    ParsedSentence,
    document_from_text,
    load_conllu,
)
from .granularity import (
    BucketAssignment,
    GranularityConfig,
    bucket_split,
    event_sequence,
    granu_score,
)
from .selector import (
    SelectorConfig,
    build_candidate_set,
    prune_sentences,
    rank_events,
    top_events,
)
from .summarizer import (
    CachingBackend,
    GeneratedSummary,
    SummarizerBackend,
    generate,
    split_sentences,
)
from .textmetrics import DEFAULT_METRIC_CONFIG, MetricConfig, RougeScore, rouge_n, tokenize


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class GranularityLevelSpec:
    name: str
    num_sentences: int
    event_fraction: float


@dataclass(frozen=True)
class LevelResult:
    level: GranularityLevelSpec
    summary: Optional[GeneratedSummary]
    events_used: tuple[str, ...]
    error: Optional[str] = None


@dataclass(frozen=True)
class MultiGranularityResult:
    doc_id: str
    levels: tuple[LevelResult, ...]


def summarize_multi_granularity(
    doc: ParsedDocument,
    levels: Sequence[GranularityLevelSpec],
    backend: SummarizerBackend,
    patterns: Sequence[EventPattern],
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
    lambda1: float = 1.0,
    lambda2: float = 0.4,
) -> MultiGranularityResult:
    """Per level: prune sentences, rank the candidate events, keep the top
    fraction, and generate with those events as hints (no leading mask).

    Failures are captured per level so the other levels still produce
    output.
    """
    if not levels:
        raise PipelineError("at least one granularity level is required")
    cached = backend if isinstance(backend, CachingBackend) else CachingBackend(backend)
    results: list[LevelResult] = []
    for level in levels:
        try:
            config = SelectorConfig(
                lambda1=lambda1,
                lambda2=lambda2,
                num_sentences=level.num_sentences,
                event_fraction=level.event_fraction,
            )
            selected = prune_sentences(doc, config, metrics)
            candidates = build_candidate_set(doc, selected, patterns)
            if not candidates.events:
                raise PipelineError("no events extracted from the selected sentences")
            if len(candidates.events) == 1:
                hints = [candidates.events[0].text]
            else:
                ranking = rank_events(candidates, doc, cached, metrics)
                hints = [e.text for e in top_events(ranking, level.event_fraction)]
            summary = generate(cached, hints, doc)
            results.append(
                LevelResult(level=level, summary=summary, events_used=tuple(hints))
            )
        except Exception as exc:
            results.append(
                LevelResult(level=level, summary=None, events_used=(), error=str(exc))
            )
    return MultiGranularityResult(doc_id=doc.id, levels=tuple(results))


def selector_baseline(
    doc: ParsedDocument,
    k: int,
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
    lambda1: float = 1.0,
    lambda2: float = 0.4,
) -> GeneratedSummary:
    """Extractive baseline: the pruned sentences, in document order."""
    config = SelectorConfig(lambda1=lambda1, lambda2=lambda2, num_sentences=k)
    selected = prune_sentences(doc, config, metrics)
    indices = sorted(selected.indices)
    text = " ".join(doc.sentences[i].text for i in indices)
    return GeneratedSummary(text=text, sentence_count=len(indices))


# ---------------------------------------------------------------------------
# ROUGE evaluation
# ---------------------------------------------------------------------------

def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence ROUGE over whole token sequences."""
    m, n = len(candidate), len(reference)
    if m == 0 or n == 0:
        return RougeScore(0.0, 0.0, 0.0)
    prev = [0] * (n + 1)
    for i in range(1, m + 1):
        cur = [0] * (n + 1)
        for j in range(1, n + 1):
            if candidate[i - 1] == reference[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    lcs = prev[n]
    precision = lcs / m
    recall = lcs / n
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return RougeScore(precision, recall, f1)


@dataclass(frozen=True)
class SampleScore:
    sample_id: str
    rouge1: float
    rouge2: float
    rougeL: float


@dataclass(frozen=True)
class ReportRow:
    group: str
    count: int
    rouge1: float
    rouge2: float
    rougeL: float


@dataclass
class EvalReport:
    rows: list[ReportRow]
    samples: list[SampleScore] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["group,count,rouge1,rouge2,rougeL"]
        lines.extend(
            f"{r.group},{r.count},{r.rouge1:.6f},{r.rouge2:.6f},{r.rougeL:.6f}"
            for r in self.rows
        )
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        header = f"{'group':<16}{'n':>6}{'R-1':>10}{'R-2':>10}{'R-L':>10}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.group:<16}{r.count:>6}{100 * r.rouge1:>10.2f}"
                f"{100 * r.rouge2:>10.2f}{100 * r.rougeL:>10.2f}"
            )
        return "\n".join(lines) + "\n"


def _score_pair(
    output: str, refs: Sequence[str], metrics: MetricConfig, multi_ref: str
) -> tuple[float, float, float]:
    variant = metrics.rouge_variant
    out_tokens = tokenize(output, metrics)
    per_ref = []
    for ref in refs:
        ref_tokens = tokenize(ref, metrics)
        per_ref.append(
            (
                rouge_n(out_tokens, ref_tokens, 1).component(variant),
                rouge_n(out_tokens, ref_tokens, 2).component(variant),
                rouge_l(out_tokens, ref_tokens).component(variant),
            )
        )
    if multi_ref == "max":
        return tuple(max(vals) for vals in zip(*per_ref))  # type: ignore[return-value]
    return tuple(sum(vals) / len(vals) for vals in zip(*per_ref))  # type: ignore[return-value]


def evaluate_rouge(
    outputs: Sequence[tuple[str, str]],
    references: Sequence[tuple[str, Sequence[str]]],
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
    multi_ref: str = "max",
    group: str = "all",
) -> EvalReport:
    """Mean per-sample ROUGE-1/2/L of outputs against their references.

    Multiple references combine per metric via max (the default) or mean.
    """
    if multi_ref not in ("max", "mean"):
        raise PipelineError(f"multi_ref must be 'max' or 'mean', got {multi_ref!r}")
    ref_map = {sample_id: list(refs) for sample_id, refs in references}
    samples: list[SampleScore] = []
    for sample_id, output in outputs:
        refs = ref_map.get(sample_id)
        if not refs:
            raise PipelineError(f"no references for sample {sample_id!r}")
        r1, r2, rl = _score_pair(output, refs, metrics, multi_ref)
        samples.append(SampleScore(sample_id=sample_id, rouge1=r1, rouge2=r2, rougeL=rl))
    row = _aggregate(group, samples)
    return EvalReport(rows=[row], samples=samples)


def _aggregate(group: str, samples: Sequence[SampleScore]) -> ReportRow:
    n = len(samples)
    if n == 0:
        return ReportRow(group=group, count=0, rouge1=0.0, rouge2=0.0, rougeL=0.0)
    return ReportRow(
        group=group,
        count=n,
        rouge1=sum(s.rouge1 for s in samples) / n,
        rouge2=sum(s.rouge2 for s in samples) / n,
        rougeL=sum(s.rougeL for s in samples) / n,
    )


# ---------------------------------------------------------------------------
# Bucket-based evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BucketSample:
    sample_id: str
    doc: ParsedDocument
    reference_doc: ParsedDocument  # parsed reference summary, for event extraction
    references: tuple[str, ...]
    output: str


def evaluate_buckets(
    samples: Sequence[BucketSample],
    patterns: Sequence[EventPattern],
    granu_config: GranularityConfig = GranularityConfig(),
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
    multi_ref: str = "max",
    n_buckets: int = 3,
) -> tuple[EvalReport, list[BucketAssignment]]:
    """Granularity-score every sample, split into buckets, and report
    per-bucket mean ROUGE of the system outputs."""
    scores: list[tuple[str, float]] = []
    by_id = {}
    for sample in samples:
        doc_seq = event_sequence(sample.doc, patterns)
        ref_seq = event_sequence(sample.reference_doc, patterns)
        scores.append((sample.sample_id, granu_score(doc_seq, ref_seq, granu_config)))
        by_id[sample.sample_id] = sample
    assignments = bucket_split(scores, n_buckets)
    buckets: dict[str, list[SampleScore]] = {}
    order: list[str] = []
    for assignment in assignments:
        sample = by_id[assignment.sample_id]
        r1, r2, rl = _score_pair(sample.output, sample.references, metrics, multi_ref)
        if assignment.bucket not in buckets:
            buckets[assignment.bucket] = []
            order.append(assignment.bucket)
        buckets[assignment.bucket].append(
            SampleScore(sample_id=sample.sample_id, rouge1=r1, rouge2=r2, rougeL=rl)
        )
    rows = [_aggregate(bucket, buckets[bucket]) for bucket in order]
    all_samples = [s for bucket in order for s in buckets[bucket]]
    return EvalReport(rows=rows, samples=all_samples), assignments


# ---------------------------------------------------------------------------
# Corpus loading (JSONL external interface)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusSample:
    id: str
    doc: ParsedDocument
    references: tuple[str, ...]
    named_references: Optional[dict[str, str]] = None
    reference_doc: Optional[ParsedDocument] = None


def _concatenate_documents(doc_id: str, docs: Sequence[ParsedDocument]) -> ParsedDocument:
    sentences: list[ParsedSentence] = []
    for doc in docs:
        for s in doc.sentences:
            sentences.append(ParsedSentence(tokens=s.tokens, text=s.text, index=len(sentences)))
    return ParsedDocument(id=doc_id, sentences=tuple(sentences))


def load_corpus(path: str) -> list[CorpusSample]:
    """Read corpus JSONL: {"id", "documents": [str] or "conllu_path",
    "references": [str] or {name: str}, optional "references_conllu_path"}.

    Multiple documents per sample are concatenated into one.
    """
    base_dir = os.path.dirname(os.path.abspath(path))
    samples: list[CorpusSample] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if "id" not in row:
                raise PipelineError(f"{path}:{line_no}: missing 'id'")
            sample_id = str(row["id"])
            if "conllu_path" in row:
                conllu_path = _resolve(row["conllu_path"], base_dir)
                parsed = load_conllu(conllu_path)
                doc = _concatenate_documents(sample_id, parsed.documents)
            elif "documents" in row:
                docs = [
                    document_from_text(f"{sample_id}/{i}", split_sentences(text))
                    for i, text in enumerate(row["documents"])
                ]
                doc = _concatenate_documents(sample_id, docs)
            else:
                raise PipelineError(f"{path}:{line_no}: need 'documents' or 'conllu_path'")
            refs_raw = row.get("references", [])
            named = None
            if isinstance(refs_raw, dict):
                named = {str(k): str(v) for k, v in refs_raw.items()}
                references = tuple(named.values())
            else:
                references = tuple(str(r) for r in refs_raw)
            reference_doc = None
            if "references_conllu_path" in row:
                ref_parse = load_conllu(_resolve(row["references_conllu_path"], base_dir))
                reference_doc = _concatenate_documents(f"{sample_id}/refs", ref_parse.documents)
            samples.append(
                CorpusSample(
                    id=sample_id,
                    doc=doc,
                    references=references,
                    named_references=named,
                    reference_doc=reference_doc,
                )
            )
    return samples


def _resolve(p: str, base_dir: str) -> str:
    return p if os.path.isabs(p) else os.path.join(base_dir, p)
