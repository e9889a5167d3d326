"""Event-conditioned generation backends and the prompt wire format.

The prompt is ``e1 | e2 | ... <seg> context`` where masked sentences in
the context are rendered as a mask placeholder. Two backends are
provided: a deterministic greedy-set-cover oracle over the source
sentences (for model-free tests and offline runs), and an HTTP client
for a sidecar model server.
"""

from __future__ import annotations

import json
import random
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

import httpx

from .eventx import Event, EventPattern, ParsedDocument, extract_events

SEG_TOKEN = "⟨seg⟩"    # ⟨seg⟩
MASK_TOKEN = "⟨mask⟩"  # ⟨mask⟩
EVENT_SEPARATOR = " | "

CONTEXT_TOKEN_BUDGET = 3072  # whitespace tokens kept in the transported context

_SENT_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


class RequestError(ValueError):
    """Invalid summary request (reserved tokens in inputs, empty events)."""


class BackendError(RuntimeError):
    """Base class for generation failures."""


class EmptyOutputError(BackendError):
    pass


class RemoteTransportError(BackendError):
    pass


class RemoteStatusError(BackendError):
    def __init__(self, status_code: int, body: str):
        super().__init__(f"remote returned HTTP {status_code}: {body[:200]}")
        self.status_code = status_code
        self.body = body


class RemoteProtocolError(BackendError):
    pass


@dataclass(frozen=True)
class GeneratedSummary:
    text: str
    sentence_count: int


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENT_SPLIT_RE.split(text.strip()) if s]


@dataclass(frozen=True)
class SummaryRequest:
    events: tuple[str, ...]
    context: str
    include_leading_mask: bool = False
    max_output_sentences: Optional[int] = None

    def __post_init__(self):
        for event in self.events:
            if not event:
                raise RequestError("empty event text")
            if SEG_TOKEN in event or MASK_TOKEN in event or EVENT_SEPARATOR in event:
                raise RequestError(f"event text contains a reserved token: {event!r}")
        if SEG_TOKEN in self.context:
            raise RequestError("context contains the reserved segment token")
        if self.max_output_sentences is not None and self.max_output_sentences < 1:
            raise RequestError("max_output_sentences must be positive")


def serialize_request(req: SummaryRequest) -> str:
    """``e1 | e2 <seg> context``; a single leading mask precedes the
    context when requested (pre-training format, omitted at inference)."""
    prefix = EVENT_SEPARATOR.join(req.events)
    context = req.context
    if req.include_leading_mask:
        context = f"{MASK_TOKEN} {context}" if context else MASK_TOKEN
    return f"{prefix} {SEG_TOKEN} {context}" if prefix else f"{SEG_TOKEN} {context}"


# ---------------------------------------------------------------------------
# Pre-training sample construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PretrainSample:
    input: str
    target: str
    doc_id: str
    num_masked: int


@dataclass(frozen=True)
class PretrainConfig:
    max_mask_cap: int = 10
    mask_fraction_divisor: int = 3
    seed: int = 0

    def samples_per_doc(self, num_sentences: int) -> int:
        return max(1, min(self.max_mask_cap, num_sentences // self.mask_fraction_divisor))


def make_pretrain_samples(
    doc: ParsedDocument,
    patterns: Sequence[EventPattern],
    config: PretrainConfig,
) -> list[PretrainSample]:
    """One sample per mask count m = 1..n: mask m eventful sentences,
    prepend their events, target the masked sentences in document order.

    Reference summaries on the document are never consulted. Draws are
    seeded per (seed, doc, m), so reruns are byte-identical and the m
    draws are independent of each other.
    """
    per_sentence_events = [extract_events(s, patterns) for s in doc.sentences]
    pool = [i for i, evs in enumerate(per_sentence_events) if evs]
    if not pool:
        return []
    n = config.samples_per_doc(len(doc.sentences))
    samples: list[PretrainSample] = []
    for m in range(1, n + 1):
        rng = random.Random(f"{config.seed}:{doc.id}:{m}")
        masked = sorted(rng.sample(pool, min(m, len(pool))))
        masked_set = set(masked)
        events = [e.text for i in masked for e in per_sentence_events[i]]
        context = " ".join(
            MASK_TOKEN if s.index in masked_set else s.text for s in doc.sentences
        )
        target = " ".join(doc.sentences[i].text for i in masked)
        req = SummaryRequest(events=tuple(events), context=context)
        samples.append(
            PretrainSample(
                input=serialize_request(req),
                target=target,
                doc_id=doc.id,
                num_masked=len(masked),
            )
        )
    return samples


def pretrain_samples_to_jsonl(samples: Iterable[PretrainSample]) -> str:
    lines = [
        json.dumps(
            {"input": s.input, "target": s.target, "doc_id": s.doc_id, "num_masked": s.num_masked},
            ensure_ascii=False,
        )
        for s in samples
    ]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

class SummarizerBackend(Protocol):
    def generate(
        self,
        events: Sequence[str],
        doc: ParsedDocument,
        max_sentences: Optional[int] = None,
    ) -> GeneratedSummary:
        ...


def _truncate_sentences(text: str, max_sentences: Optional[int]) -> GeneratedSummary:
    sentences = split_sentences(text)
    if max_sentences is not None and len(sentences) > max_sentences:
        sentences = sentences[:max_sentences]
        text = " ".join(sentences)
    return GeneratedSummary(text=text, sentence_count=len(sentences))


def generate(
    backend: SummarizerBackend,
    events: Sequence[str],
    doc: ParsedDocument,
    max_sentences: Optional[int] = None,
) -> GeneratedSummary:
    summary = backend.generate(events, doc, max_sentences)
    if not summary.text:
        raise EmptyOutputError("backend produced empty output")
    if max_sentences is not None and summary.sentence_count > max_sentences:
        summary = _truncate_sentences(summary.text, max_sentences)
    return summary


class ExtractiveOracle:
    """Deterministic backend: greedy set cover of the hinted events by
    source sentences, matched by lemma-level substring containment.

    Output depends only on the *set* of event texts, which is what makes
    removing a duplicated event a no-op for salience ranking.
    """

    def generate(
        self,
        events: Sequence[str],
        doc: ParsedDocument,
        max_sentences: Optional[int] = None,
    ) -> GeneratedSummary:
        if not events:
            raise RequestError("ExtractiveOracle requires a nonempty event list")
        if not doc.sentences:
            raise RequestError("ExtractiveOracle requires a nonempty document")
        wanted = set(events)
        lemma_strings = [
            " " + " ".join(t.lemma.lower() for t in s.tokens) + " " for s in doc.sentences
        ]

        def covered_by(sent_i: int, remaining: set) -> set:
            return {e for e in remaining if f" {e.lower()} " in lemma_strings[sent_i]}

        picked: list[int] = []
        remaining = set(wanted)
        while remaining:
            best_i, best_cov = -1, set()
            for i in range(len(doc.sentences)):
                if i in picked:
                    continue
                cov = covered_by(i, remaining)
                if len(cov) > len(best_cov):
                    best_i, best_cov = i, cov
            if best_i < 0:
                break
            if max_sentences is not None and len(picked) >= max_sentences:
                break
            picked.append(best_i)
            remaining -= best_cov
        if not picked:
            raise EmptyOutputError("no document sentence covers any hinted event")
        picked.sort()
        text = " ".join(doc.sentences[i].text for i in picked)
        return GeneratedSummary(text=text, sentence_count=len(picked))


class CachingBackend:
    """Caches generation results by the set of distinct event texts.

    Safe under concurrent insertion; at worst a race recomputes a value.
    """

    def __init__(self, inner: SummarizerBackend):
        self.inner = inner
        self._cache: dict = {}
        self._lock = threading.Lock()

    def generate(
        self,
        events: Sequence[str],
        doc: ParsedDocument,
        max_sentences: Optional[int] = None,
    ) -> GeneratedSummary:
        key = (frozenset(events), doc.id, max_sentences)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        result = self.inner.generate(events, doc, max_sentences)
        with self._lock:
            self._cache[key] = result
        return result


@dataclass
class RemoteBackend:
    """HTTP client for the sidecar model server wire protocol."""

    url: str
    timeout: float = 120.0
    retries: int = 2
    max_in_flight: int = 4
    _client: httpx.Client = field(init=False, repr=False)
    _slots: threading.Semaphore = field(init=False, repr=False)

    def __post_init__(self):
        self._client = httpx.Client(base_url=self.url, timeout=self.timeout)
        self._slots = threading.Semaphore(self.max_in_flight)

    def generate(
        self,
        events: Sequence[str],
        doc: ParsedDocument,
        max_sentences: Optional[int] = None,
    ) -> GeneratedSummary:
        context_tokens = doc.text.split()
        context = " ".join(context_tokens[:CONTEXT_TOKEN_BUDGET])
        payload = {
            "events": list(events),
            "context": context,
            "include_leading_mask": False,
            "max_sentences": max_sentences,
        }
        last_exc: Optional[Exception] = None
        for _ in range(self.retries + 1):
            with self._slots:
                try:
                    response = self._client.post("/v1/generate", json=payload)
                except httpx.HTTPError as exc:
                    last_exc = exc
                    continue
            if response.status_code != 200:
                raise RemoteStatusError(response.status_code, response.text)
            try:
                body = response.json()
                text = body["summary"]
            except (ValueError, KeyError, TypeError) as exc:
                raise RemoteProtocolError(f"malformed response body: {response.text[:200]}") from exc
            if not isinstance(text, str) or not text:
                raise EmptyOutputError("remote backend returned an empty summary")
            return _truncate_sentences(text, max_sentences)
        raise RemoteTransportError(f"request to {self.url} failed: {last_exc}")

    def health(self) -> bool:
        try:
            response = self._client.get("/v1/health")
        except httpx.HTTPError:
            return False
        return response.status_code == 200

    def close(self):
        self._client.close()
