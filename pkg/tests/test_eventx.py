import io
import json

import pytest

from conftest import fixture_path
from eventsum.eventx import (
    ConlluError,
    PatternError,
    default_patterns,
    document_from_text,
    events_to_jsonl,
    extract_document_events,
    extract_events,
    load_conllu,
    load_patterns,
    parse_conllu,
    parse_pattern_line,
)


def parse_text(text):
    return parse_conllu(io.StringIO(text))


GOOD_SENTENCE = """\
# newdoc id = d1
# sent_id = 1
# text = Dogs bark.
1\tDogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\t_
2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\t_
3\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_
"""


class TestParseConllu:
    def test_basic_document(self):
        parsed = parse_text(GOOD_SENTENCE)
        assert parsed.warnings == []
        assert len(parsed.documents) == 1
        doc = parsed.documents[0]
        assert doc.id == "d1"
        assert doc.text == "Dogs bark."
        sentence = doc.sentences[0]
        assert [t.form for t in sentence.tokens] == ["Dogs", "bark", "."]
        assert sentence.tokens[0].head == 2
        assert sentence.tokens[1].deprel == "root"

    def test_newdoc_splits_documents(self):
        text = GOOD_SENTENCE + "\n# newdoc id = d2\n" + GOOD_SENTENCE.split("\n", 1)[1]
        parsed = parse_text(text)
        assert [d.id for d in parsed.documents] == ["d1", "d2"]

    def test_multiword_and_empty_nodes_skipped(self):
        text = (
            "# text = Don't go.\n"
            "1-2\tDon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tDo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_\n"
            "2\tn't\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_\n"
            "2.1\tghost\tghost\tNOUN\tNN\t_\t_\t_\t_\t_\n"
            "3\tgo\tgo\tVERB\tVB\t_\t0\troot\t_\t_\n"
            "4\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_\n"
        )
        parsed = parse_text(text)
        assert parsed.warnings == []
        forms = [t.form for t in parsed.documents[0].sentences[0].tokens]
        assert forms == ["Do", "n't", "go", "."]

    def test_cycle_dropped_with_warning(self):
        text = (
            "1\ta\ta\tNOUN\tNN\t_\t2\tnsubj\t_\t_\n"
            "2\tb\tb\tVERB\tVB\t_\t3\tccomp\t_\t_\n"
            "3\tc\tc\tVERB\tVB\t_\t2\tccomp\t_\t_\n"
        )
        parsed = parse_text(text)
        assert parsed.documents == [] or not parsed.documents[0].sentences
        assert len(parsed.warnings) == 1

    def test_multiple_roots_dropped_with_warning(self):
        text = (
            "1\ta\ta\tVERB\tVB\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tVERB\tVB\t_\t0\troot\t_\t_\n"
        )
        parsed = parse_text(text)
        assert len(parsed.warnings) == 1

    def test_head_out_of_range_dropped_with_warning(self):
        text = "1\ta\ta\tVERB\tVB\t_\t9\troot\t_\t_\n"
        parsed = parse_text(text)
        assert len(parsed.warnings) == 1

    def test_non_contiguous_ids_dropped_with_warning(self):
        text = (
            "1\ta\ta\tVERB\tVB\t_\t0\troot\t_\t_\n"
            "3\tb\tb\tNOUN\tNN\t_\t1\tobj\t_\t_\n"
        )
        parsed = parse_text(text)
        assert len(parsed.warnings) == 1

    def test_malformed_column_count_raises(self):
        with pytest.raises(ConlluError):
            parse_text("1\ta\ta\n")

    def test_sentence_text_falls_back_to_forms(self):
        text = (
            "1\tBirds\tbird\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
            "2\tsing\tsing\tVERB\tVBP\t_\t0\troot\t_\t_\n"
        )
        parsed = parse_text(text)
        assert parsed.documents[0].sentences[0].text == "Birds sing"


class TestPatternDsl:
    def test_parse_single_line(self):
        pattern = parse_pattern_line("n1 := n1@nsubj, v1@center", 1)
        assert pattern.id == "n1"
        assert pattern.slots == (("n1", "nsubj"), ("v1", "center"))

    def test_relation_alias_normalized(self):
        pattern = parse_pattern_line("p := n1@nsubj:pass, v1@center", 1)
        assert ("n1", "nsubjpass") in pattern.slots

    def test_unknown_relation_rejected(self):
        with pytest.raises(PatternError):
            parse_pattern_line("p := n1@nsubjjj, v1@center", 1)

    def test_unknown_role_rejected(self):
        with pytest.raises(PatternError):
            parse_pattern_line("p := n9@nsubj, v1@center", 1)

    def test_missing_center_rejected(self):
        with pytest.raises(PatternError):
            parse_pattern_line("p := n1@nsubj", 1)

    def test_duplicate_ids_rejected(self):
        stream = io.StringIO("p := v1@center\np := n1@nsubj, v1@center\n")
        with pytest.raises(PatternError):
            load_patterns(stream)

    def test_comments_and_blanks_skipped(self):
        stream = io.StringIO("# comment\n\np := v1@center\n")
        assert len(load_patterns(stream)) == 1

    def test_default_patterns_include_published_set(self):
        ids = [p.id for p in default_patterns()]
        assert ids[:5] == [
            "n1-nsubj-v1",
            "n1-nsubj-v1-dobj-n2",
            "n1-nsubj-v1-xcomp-a",
            "n1-nsubj-v1-xcomp-v2-dobj-n2",
            "n1-nsubjpass-v1",
        ]
        assert "v1" in ids


def events_of(fixture, sentence=None):
    doc = load_conllu(fixture_path(fixture)).documents[0]
    if sentence is None:
        events = extract_document_events(doc, default_patterns())
    else:
        events = extract_events(doc.sentences[sentence], default_patterns())
    return [(e.text, e.pattern_id) for e in events]


class TestExtraction:
    def test_simple_subject_verb(self):
        assert events_of("pattern_examples.conllu", 0) == [("Hurricane hit", "n1-nsubj-v1")]

    def test_subject_verb_object(self):
        assert events_of("pattern_examples.conllu", 1) == [
            ("Hurricane damage building", "n1-nsubj-v1-dobj-n2")
        ]

    def test_adjectival_complement(self):
        assert events_of("pattern_examples.conllu", 2) == [
            ("People feel scared", "n1-nsubj-v1-xcomp-a")
        ]

    def test_controlled_verb_complement(self):
        got = events_of("pattern_examples.conllu", 3)
        assert got[0] == ("Police want to save people", "n1-nsubj-v1-xcomp-v2-dobj-n2")
        # the embedded verb is itself a centric verb with an inherited subject
        assert ("Police save people", "n1-nsubj-v1-dobj-n2") in got

    def test_passive_subject(self):
        assert events_of("pattern_examples.conllu", 4) == [
            ("Resident be injure", "n1-nsubjpass-v1")
        ]

    def test_active_and_passive_from_one_sentence(self):
        assert events_of("malone.conllu", 0) == [
            ("club say", "n1-nsubj-v1"),
            ("Malone be remember", "n1-nsubjpass-v1"),
        ]

    def test_name_parts_joined_and_parataxis_subject(self):
        assert events_of("malone.conllu", 1) == [
            ("Moses Malone die", "n1-nsubj-v1"),
            ("76ers say", "n1-nsubj-v1"),
        ]

    def test_particle_conjunction_and_clausal_subjects(self):
        assert events_of("hurricane.conllu", 1) == [
            ("Mitch roar", "n1-nsubj-v1"),
            ("Mitch churn up wave and rain", "n1-nsubj-v1-dobj-n2"),
            ("send", "v1"),
            ("resident scurry", "n1-nsubj-v1"),
        ]

    def test_document_order_preserved(self):
        events = events_of("hurricane.conllu")
        assert events[0] == ("Honduras brace", "n1-nsubj-v1")
        assert events[-1] == ("military pluck resident", "n1-nsubj-v1-dobj-n2")

    def test_auxiliaries_are_not_centric(self):
        # "will" and "be" in the first Malone sentence head no events
        events = events_of("malone.conllu", 0)
        assert len(events) == 2

    def test_empty_pattern_list_yields_nothing(self):
        doc = load_conllu(fixture_path("malone.conllu")).documents[0]
        assert extract_events(doc.sentences[0], []) == []


class TestSerialization:
    def test_events_to_jsonl(self):
        doc = load_conllu(fixture_path("pattern_examples.conllu")).documents[0]
        events = extract_document_events(doc, default_patterns())
        lines = events_to_jsonl(doc.id, events).strip().split("\n")
        rows = [json.loads(line) for line in lines]
        assert rows[0] == {
            "doc_id": "pattern-examples",
            "sentence_index": 0,
            "pattern_id": "n1-nsubj-v1",
            "text": "Hurricane hit",
        }
        assert all(r["doc_id"] == "pattern-examples" for r in rows)

    def test_document_from_text_yields_no_events(self):
        doc = document_from_text("raw", ["Dogs bark loudly.", "Cats nap."])
        assert len(doc.sentences) == 2
        assert extract_document_events(doc, default_patterns()) == []
