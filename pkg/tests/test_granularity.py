import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_doc, svo_sentence
from eventsum.eventx import default_patterns
from eventsum.granularity import (
    BucketAssignment,
    EventSequence,
    GranularityConfig,
    GranularityError,
    bucket_split,
    buckets_to_csv,
    event_sequence,
    granu_score,
    load_token_embeddings,
)
from oracles import naive_granu_exact


class TestEventSequence:
    def test_lowercased_tokens_in_extraction_order(self):
        doc = make_doc(
            "seq",
            [svo_sentence(0, "Alice", "build", "house"), svo_sentence(1, "Bob", "paint", "wall")],
        )
        seq = event_sequence(doc, default_patterns())
        assert seq.tokens == ("alice", "build", "house", "bob", "paint", "wall")
        assert seq.text == "alice build house bob paint wall"

    def test_eventless_doc_gives_empty_sequence(self):
        from eventsum.eventx import document_from_text

        doc = document_from_text("raw", ["Plain text only."])
        assert event_sequence(doc, default_patterns()).tokens == ()


class TestGranuScore:
    def test_exact_recall_counts_covered_tokens(self):
        doc = EventSequence(tokens=("a", "b", "c", "d"))
        ref = EventSequence(tokens=("b", "d", "x"))
        assert granu_score(doc, ref) == pytest.approx(0.5)

    def test_repeated_doc_tokens_each_count(self):
        doc = EventSequence(tokens=("a", "a", "b"))
        ref = EventSequence(tokens=("a",))
        assert granu_score(doc, ref) == pytest.approx(2 / 3)

    def test_empty_reference_scores_zero(self):
        doc = EventSequence(tokens=("a",))
        assert granu_score(doc, EventSequence(tokens=())) == 0.0

    def test_empty_document_is_an_error(self):
        with pytest.raises(GranularityError):
            granu_score(EventSequence(tokens=()), EventSequence(tokens=("a",)))

    def test_matches_naive_counting_on_random_pairs(self):
        rnd = random.Random(99)
        vocab = list("abcdefgh")
        for _ in range(100):
            doc = EventSequence(tokens=tuple(rnd.choices(vocab, k=rnd.randint(1, 20))))
            ref = EventSequence(tokens=tuple(rnd.choices(vocab, k=rnd.randint(0, 20))))
            assert granu_score(doc, ref) == pytest.approx(
                naive_granu_exact(doc.tokens, ref.tokens), abs=1e-12
            )

    def test_embedding_recall(self, tmp_path):
        rows = [
            {"token": "cat", "vector": [1.0, 0.0]},
            {"token": "dog", "vector": [1.0, 0.0]},
            {"token": "car", "vector": [0.0, 1.0]},
        ]
        path = tmp_path / "emb.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        config = GranularityConfig(scorer="embedding-recall", embedding_source=str(path))
        doc = EventSequence(tokens=("cat", "car"))
        ref = EventSequence(tokens=("dog",))
        # cat~dog cosine 1.0, car~dog cosine 0.0 -> mean 0.5
        assert granu_score(doc, ref, config) == pytest.approx(0.5)

    def test_embedding_missing_token_is_an_error(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text(json.dumps({"token": "cat", "vector": [1.0]}) + "\n")
        config = GranularityConfig(scorer="embedding-recall", embedding_source=str(path))
        doc = EventSequence(tokens=("cat", "unknown"))
        with pytest.raises(GranularityError, match="unknown"):
            granu_score(doc, EventSequence(tokens=("cat",)), config)

    def test_embedding_dimension_mismatch_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text(
            json.dumps({"token": "a", "vector": [1.0, 0.0]})
            + "\n"
            + json.dumps({"token": "b", "vector": [1.0]})
            + "\n"
        )
        with pytest.raises(GranularityError):
            load_token_embeddings(str(path))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GranularityConfig(scorer="cosine")
        with pytest.raises(ValueError):
            GranularityConfig(scorer="embedding-recall")


def check_bucket_invariants(scores, assignments, n_buckets):
    by_bucket = {}
    order = []
    for a in assignments:
        if a.bucket not in by_bucket:
            by_bucket[a.bucket] = []
            order.append(a.bucket)
        by_bucket[a.bucket].append(a)
    sizes = [len(by_bucket[b]) for b in order]
    assert sum(sizes) == len(scores)
    assert max(sizes) - min(sizes) <= 1
    assert sizes == sorted(sizes, reverse=True)  # larger buckets first
    for earlier, later in zip(order, order[1:]):
        assert max(a.score for a in by_bucket[earlier]) <= min(
            a.score for a in by_bucket[later]
        )
    assert len(order) == n_buckets


class TestBucketSplit:
    def test_three_way_labels(self):
        scores = [(f"s{i}", float(i)) for i in range(7)]
        assignments = bucket_split(scores)
        buckets = [a.bucket for a in assignments]
        assert buckets == ["Low"] * 3 + ["Medium"] * 2 + ["High"] * 2

    def test_generic_labels_for_other_counts(self):
        scores = [(f"s{i}", float(i)) for i in range(5)]
        assignments = bucket_split(scores, n_buckets=2)
        assert {a.bucket for a in assignments} == {"B1", "B2"}

    def test_ties_break_by_sample_id(self):
        scores = [("b", 1.0), ("a", 1.0), ("c", 1.0)]
        assignments = bucket_split(scores)
        assert [a.sample_id for a in assignments] == ["a", "b", "c"]

    def test_too_few_samples_rejected(self):
        with pytest.raises(GranularityError):
            bucket_split([("a", 1.0), ("b", 2.0)], n_buckets=3)
        with pytest.raises(GranularityError):
            bucket_split([("a", 1.0), ("b", 2.0)], n_buckets=1)

    def test_invariants_on_random_lists(self):
        rnd = random.Random(4)
        for trial in range(300):
            n_buckets = rnd.choice([2, 3, 4])
            n = rnd.randint(n_buckets, 40)
            scores = [(f"s{i}", rnd.choice([0.0, 0.25, rnd.random(), 1.0])) for i in range(n)]
            assignments = bucket_split(scores, n_buckets)
            check_bucket_invariants(scores, assignments, n_buckets)

    def test_all_ties(self):
        scores = [(f"s{i}", 0.5) for i in range(9)]
        assignments = bucket_split(scores)
        check_bucket_invariants(scores, assignments, 3)

    @settings(deadline=None, max_examples=150)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=3, max_size=30),
        st.integers(min_value=2, max_value=3),
    )
    def test_invariants_property(self, values, n_buckets):
        if len(values) < n_buckets:
            values = values + [0.5] * (n_buckets - len(values))
        scores = [(f"s{i:02d}", v) for i, v in enumerate(values)]
        assignments = bucket_split(scores, n_buckets)
        check_bucket_invariants(scores, assignments, n_buckets)

    def test_csv_output(self):
        assignments = [
            BucketAssignment(sample_id="a", score=0.125, bucket="Low"),
            BucketAssignment(sample_id="b", score=0.75, bucket="High"),
        ]
        assert buckets_to_csv(assignments) == (
            "sample_id,score,bucket\na,0.125000,Low\nb,0.750000,High\n"
        )
