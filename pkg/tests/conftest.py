import os
import random
import sys

import pytest

from eventsum.eventx import ParsedDocument, ParsedSentence, ParsedToken

sys.path.insert(0, os.path.dirname(__file__))

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def plain_sentence(words, index, upos="X"):
    """Sentence without dependency structure (selector-level tests)."""
    tokens = tuple(
        ParsedToken(form=w, lemma=w.lower(), upos=upos, head=0, deprel="dep") for w in words
    )
    return ParsedSentence(tokens=tokens, text=" ".join(words), index=index)


def svo_sentence(index, subj, verb, obj=None):
    """Minimal parsed clause: subject, verb, optional object, period."""
    toks = [ParsedToken(form=subj, lemma=subj.lower(), upos="NOUN", head=2, deprel="nsubj")]
    toks.append(ParsedToken(form=verb, lemma=verb.lower(), upos="VERB", head=0, deprel="root"))
    if obj is not None:
        toks.append(ParsedToken(form=obj, lemma=obj.lower(), upos="NOUN", head=2, deprel="obj"))
    toks.append(ParsedToken(form=".", lemma=".", upos="PUNCT", head=2, deprel="punct"))
    words = [subj, verb] + ([obj] if obj is not None else [])
    return ParsedSentence(tokens=tuple(toks), text=" ".join(words) + " .", index=index)


def make_doc(doc_id, sentences):
    return ParsedDocument(id=doc_id, sentences=tuple(sentences))


VOCAB = [
    "storm", "river", "village", "bridge", "farmers", "crops", "rain",
    "flood", "rescue", "team", "roads", "damage", "night", "water",
]


def random_plain_doc(rng: random.Random, doc_id: str, n_sentences: int):
    sentences = []
    for i in range(n_sentences):
        words = rng.choices(VOCAB, k=rng.randint(3, 8))
        sentences.append(plain_sentence(words, i))
    return make_doc(doc_id, sentences)


SUBJECTS = ["Alice", "Bob", "Mara", "Iris", "Tomas", "Lena"]
VERBS = ["build", "repair", "visit", "paint", "guard", "clean"]
OBJECTS = ["house", "bridge", "garden", "boat", "tower", "wall"]


def random_svo_doc(rng: random.Random, doc_id: str, n_sentences: int):
    """Parsed doc whose sentences each yield one subject-verb-object event."""
    triples = set()
    sentences = []
    while len(sentences) < n_sentences:
        triple = (rng.choice(SUBJECTS), rng.choice(VERBS), rng.choice(OBJECTS))
        if triple in triples:
            continue
        triples.add(triple)
        sentences.append(svo_sentence(len(sentences), *triple))
    return make_doc(doc_id, sentences)


E2E_TRIPLES = [
    ("Alice", "build", "house"),
    ("Bob", "paint", "wall"),
    ("Alice", "repair", "bridge"),
    ("Mara", "guard", "tower"),
    ("Bob", "visit", "garden"),
    ("Iris", "clean", "boat"),
    ("Mara", "paint", "house"),
    ("Tomas", "build", "wall"),
    ("Iris", "repair", "boat"),
    ("Lena", "guard", "garden"),
    ("Tomas", "visit", "tower"),
    ("Lena", "clean", "bridge"),
]


def e2e_doc():
    """Fixed 12-sentence document used by the end-to-end golden test."""
    return make_doc(
        "e2e", [svo_sentence(i, *triple) for i, triple in enumerate(E2E_TRIPLES)]
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
