"""Granularity scoring and bucket splitting.

A sample's granularity score is the recall-style coverage of the source
document's event sequence by the reference summary's event sequence:
fine-grained summaries mention more of the document's events. Samples
are then sorted by score and split into equal-size buckets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .eventx import EventPattern, ParsedDocument, extract_document_events


class GranularityError(ValueError):
    pass


@dataclass(frozen=True)
class EventSequence:
    tokens: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class GranularityConfig:
    scorer: str = "exact-recall"
    embedding_source: Optional[str] = None

    def __post_init__(self):
        if self.scorer not in ("exact-recall", "embedding-recall"):
            raise ValueError(f"unknown scorer {self.scorer!r}")
        if self.scorer == "embedding-recall" and not self.embedding_source:
            raise ValueError("embedding-recall requires an embedding_source")


@dataclass(frozen=True)
class BucketAssignment:
    sample_id: str
    score: float
    bucket: str


def event_sequence(doc: ParsedDocument, patterns: Sequence[EventPattern]) -> EventSequence:
    """Space-joined concatenation of the document's event texts in
    extraction order, as lowercase tokens."""
    events = extract_document_events(doc, patterns)
    tokens: list[str] = []
    for event in events:
        tokens.extend(event.text.lower().split())
    return EventSequence(tokens=tuple(tokens))


def load_token_embeddings(path: str) -> dict[str, tuple[float, ...]]:
    """JSONL {"token": ..., "vector": [...]} with a fixed dimensionality."""
    vectors: dict[str, tuple[float, ...]] = {}
    dim: Optional[int] = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            vec = tuple(float(x) for x in row["vector"])
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise GranularityError(
                    f"line {line_no}: vector dimensionality {len(vec)} != {dim}"
                )
            vectors[row["token"]] = vec
    return vectors


def _cosine(a: Sequence[float], b: Sequence[float]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def granu_score(
    doc_events: EventSequence,
    ref_events: EventSequence,
    config: GranularityConfig = GranularityConfig(),
    embeddings: Optional[dict[str, tuple[float, ...]]] = None,
) -> float:
    """Mean over document-event tokens of their best match against the
    reference-event tokens; exact matching uses an indicator, embedding
    matching uses cosine over supplied vectors."""
    if not doc_events.tokens:
        raise GranularityError("document event sequence is empty")
    if not ref_events.tokens:
        return 0.0
    if config.scorer == "exact-recall":
        ref_set = set(ref_events.tokens)
        hits = sum(1 for t in doc_events.tokens if t in ref_set)
        return hits / len(doc_events.tokens)
    if embeddings is None:
        if config.embedding_source is None:
            raise GranularityError("embedding-recall requires token embeddings")
        embeddings = load_token_embeddings(config.embedding_source)
    missing = [t for t in set(doc_events.tokens) | set(ref_events.tokens) if t not in embeddings]
    if missing:
        raise GranularityError(f"missing embedding vectors for tokens: {sorted(missing)}")
    ref_vecs = [embeddings[t] for t in ref_events.tokens]
    total = 0.0
    for tok in doc_events.tokens:
        vec = embeddings[tok]
        total += max(_cosine(vec, rv) for rv in ref_vecs)
    return total / len(doc_events.tokens)


_THREE_BUCKETS = ("Low", "Medium", "High")


def bucket_split(
    scores: Sequence[tuple[str, float]], n_buckets: int = 3
) -> list[BucketAssignment]:
    """Stable ascending sort by (score, sample_id), then contiguous groups
    whose sizes differ by at most one (larger groups first)."""
    if n_buckets < 2:
        raise GranularityError("need at least two buckets")
    if len(scores) < n_buckets:
        raise GranularityError(f"need at least {n_buckets} samples, got {len(scores)}")
    ordered = sorted(scores, key=lambda item: (item[1], item[0]))
    base, remainder = divmod(len(ordered), n_buckets)
    if n_buckets == 3:
        labels = _THREE_BUCKETS
    else:
        labels = tuple(f"B{i + 1}" for i in range(n_buckets))
    out: list[BucketAssignment] = []
    pos = 0
    for b in range(n_buckets):
        size = base + (1 if b < remainder else 0)
        for sample_id, score in ordered[pos : pos + size]:
            out.append(BucketAssignment(sample_id=sample_id, score=score, bucket=labels[b]))
        pos += size
    return out


def buckets_to_csv(assignments: Sequence[BucketAssignment]) -> str:
    lines = ["sample_id,score,bucket"]
    lines.extend(f"{a.sample_id},{a.score:.6f},{a.bucket}" for a in assignments)
    return "\n".join(lines) + "\n"
