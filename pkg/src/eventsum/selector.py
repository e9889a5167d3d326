"""Sentence pruning and event salience ranking.

Pruning greedily picks sentences that are similar to the rest of the
document (relevance) but dissimilar to what was already picked
(redundancy), in maximal-marginal-relevance style. Ranking then scores
each candidate event by how much the generated summary changes when that
event is removed from the hint set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .eventx import Event, EventPattern, ParsedDocument, ParsedSentence, extract_events
from .summarizer import CachingBackend, GeneratedSummary, SummarizerBackend
from .textmetrics import DEFAULT_METRIC_CONFIG, MetricConfig, sim, tokenize


class SelectorError(ValueError):
    pass


@dataclass(frozen=True)
class SelectorConfig:
    lambda1: float = 1.0
    lambda2: float = 0.4
    num_sentences: int = 9
    event_fraction: float = 0.9

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda weights must be non-negative")
        if not 0 < self.event_fraction <= 1:
            raise ValueError("event_fraction must be in (0, 1]")
        if self.num_sentences < 1:
            raise ValueError("num_sentences must be positive")


@dataclass(frozen=True)
class SelectedSentences:
    # (sentence index, importance score at selection time), in pick order
    entries: tuple[tuple[int, float], ...]

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)


@dataclass(frozen=True)
class CandidateSet:
    events: tuple[Event, ...]
    origin: SelectedSentences


@dataclass(frozen=True)
class SalienceRanking:
    # (event, salience in [-2, 0]) sorted by descending salience
    entries: tuple[tuple[Event, float], ...]

    def events(self) -> list[Event]:
        return [e for e, _ in self.entries]


def relevance(
    sentence: ParsedSentence,
    doc: ParsedDocument,
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """Similarity of a sentence to the space-joined rest of the document."""
    rest = [s.text for s in doc.sentences if s.index != sentence.index]
    if not rest:
        raise SelectorError("relevance needs at least one other sentence in the document")
    return sim(tokenize(sentence.text, metrics), tokenize(" ".join(rest), metrics), metrics)


def redundancy(
    sentence: ParsedSentence,
    selected: SelectedSentences,
    doc: ParsedDocument,
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """Sum of similarities against every already-selected sentence."""
    s_tokens = tokenize(sentence.text, metrics)
    total = 0.0
    for idx in selected.indices:
        total += sim(tokenize(doc.sentences[idx].text, metrics), s_tokens, metrics)
    return total


def importance(
    sentence: ParsedSentence,
    selected: SelectedSentences,
    doc: ParsedDocument,
    config: SelectorConfig,
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    return config.lambda1 * relevance(sentence, doc, metrics) - config.lambda2 * redundancy(
        sentence, selected, doc, metrics
    )


def prune_sentences(
    doc: ParsedDocument,
    config: SelectorConfig,
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> SelectedSentences:
    """Greedy MMR pick of up to ``config.num_sentences`` sentences.

    Ties break toward the lower sentence index; a single-sentence
    document cannot be scored and is an error, as is an empty one.
    """
    if len(doc.sentences) == 0:
        raise SelectorError("cannot prune an empty document")
    if len(doc.sentences) < 2:
        raise SelectorError("pruning needs at least two sentences")
    k = min(config.num_sentences, len(doc.sentences))
    picked: list[tuple[int, float]] = []
    remaining = set(range(len(doc.sentences)))
    for _ in range(k):
        state = SelectedSentences(entries=tuple(picked))
        best_idx: Optional[int] = None
        best_score = -math.inf
        for idx in sorted(remaining):
            score = importance(doc.sentences[idx], state, doc, config, metrics)
            if score > best_score:
                best_idx, best_score = idx, score
        assert best_idx is not None
        picked.append((best_idx, best_score))
        remaining.discard(best_idx)
    return SelectedSentences(entries=tuple(picked))


def build_candidate_set(
    doc: ParsedDocument,
    selected: SelectedSentences,
    patterns: Sequence[EventPattern],
) -> CandidateSet:
    """Events of the selected sentences in document order, with exact
    duplicate texts removed (first occurrence wins)."""
    chosen = sorted(selected.indices)
    events: list[Event] = []
    seen: set[str] = set()
    for idx in chosen:
        for event in extract_events(doc.sentences[idx], patterns):
            if event.text in seen:
                continue
            seen.add(event.text)
            events.append(event)
    return CandidateSet(events=tuple(events), origin=selected)


def rank_events(
    candidates: CandidateSet,
    doc: ParsedDocument,
    backend: SummarizerBackend,
    metrics: MetricConfig = DEFAULT_METRIC_CONFIG,
    ranked_order_hints: bool = True,
) -> SalienceRanking:
    """Leave-one-out salience: Sal(e) = -Sim(summary without e, full summary).

    Issues exactly ``len(events) + 1`` generation requests; a caching
    wrapper deduplicates repeats (e.g. removing one copy of a duplicated
    event text reproduces the full request).
    """
    events = candidates.events
    if len(events) < 2:
        raise SelectorError("salience ranking needs at least two candidate events")
    cached = backend if isinstance(backend, CachingBackend) else CachingBackend(backend)
    texts = [e.text for e in events]
    full = _generate_for(cached, texts, events[0], doc)
    full_tokens = tokenize(full.text, metrics)
    scored: list[tuple[Event, float]] = []
    for i, event in enumerate(events):
        reduced = texts[:i] + texts[i + 1 :]
        loo = _generate_for(cached, reduced, event, doc)
        sal = -sim(tokenize(loo.text, metrics), full_tokens, metrics)
        scored.append((event, sal))
    order = sorted(range(len(scored)), key=lambda i: (-scored[i][1], i))
    return SalienceRanking(entries=tuple(scored[i] for i in order))


def _generate_for(
    backend: SummarizerBackend, texts: list[str], event: Event, doc: ParsedDocument
) -> GeneratedSummary:
    try:
        return backend.generate(texts, doc)
    except Exception as exc:
        raise SelectorError(f"backend failed while scoring event {event.text!r}: {exc}") from exc


def top_events(ranking: SalienceRanking, fraction: float) -> list[Event]:
    """Highest-salience prefix of the ranking: ceil(p * |ranking|) events."""
    if not 0 < fraction <= 1:
        raise SelectorError("fraction must be in (0, 1]")
    count = math.ceil(fraction * len(ranking.entries))
    return [event for event, _ in ranking.entries[:count]]
