"""Unsupervised multi-granularity summarization toolkit.

Extracts verb-centric events from dependency parses, prunes and ranks
them by salience, and drives an event-hinted summarization backend to
produce summaries at several levels of semantic coverage.
"""

from .eventx import (
    Event,
    EventPattern,
    ParsedDocument,
    ParsedSentence,
    ParsedToken,
    default_patterns,
    extract_document_events,
    extract_events,
    load_conllu,
    load_patterns,
    parse_conllu,
)
from .granularity import BucketAssignment, GranularityConfig, bucket_split, event_sequence, granu_score
from .pipeline import (
    EvalReport,
    GranularityLevelSpec,
    MultiGranularityResult,
    evaluate_buckets,
    evaluate_rouge,
    selector_baseline,
    summarize_multi_granularity,
)
from .selector import (
    CandidateSet,
    SalienceRanking,
    SelectorConfig,
    build_candidate_set,
    importance,
    prune_sentences,
    rank_events,
    redundancy,
    relevance,
    top_events,
)
from .summarizer import (
    CachingBackend,
    ExtractiveOracle,
    GeneratedSummary,
    PretrainConfig,
    PretrainSample,
    RemoteBackend,
    SummaryRequest,
    make_pretrain_samples,
    serialize_request,
)
from .textmetrics import MetricConfig, RougeScore, rouge_n, sim, tokenize

__version__ = "0.1.0"
