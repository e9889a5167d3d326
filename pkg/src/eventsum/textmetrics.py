"""Tokenization, n-gram ROUGE scores, and the pairwise text similarity
used throughout sentence pruning and event ranking.

Similarity between two token sequences is the sum of their ROUGE-1 and
ROUGE-2 scores, so it lives in [0, 2]. Which ROUGE component (F1, recall
or precision) enters the sum is configurable; F1 is the default because
it is symmetric and the compared texts have no candidate/reference
asymmetry.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

TokenSequence = tuple[str, ...]

_WORD_RE = re.compile(r"[a-z0-9]+")

_ROUGE_VARIANTS = ("f1", "recall", "precision")


@dataclass(frozen=True)
class MetricConfig:
    """Scoring knobs shared by every similarity computation.

    Stemming is off by default so that selection scores stay deterministic
    and word-list free; the evaluation harness turns it on to mimic the
    standard ROUGE setup.
    """

    stemming: bool = False
    rouge_variant: str = "f1"

    def __post_init__(self):
        if self.rouge_variant not in _ROUGE_VARIANTS:
            raise ValueError(
                f"rouge_variant must be one of {_ROUGE_VARIANTS}, got {self.rouge_variant!r}"
            )


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    def component(self, variant: str) -> float:
        if variant == "f1":
            return self.f1
        if variant == "recall":
            return self.recall
        if variant == "precision":
            return self.precision
        raise ValueError(f"unknown ROUGE variant {variant!r}")


DEFAULT_METRIC_CONFIG = MetricConfig()


def tokenize(text: str, config: MetricConfig = DEFAULT_METRIC_CONFIG) -> TokenSequence:
    """Lowercase word tokens of ``text``; punctuation acts as a boundary.

    NFC-normalizes first, then keeps maximal [a-z0-9] runs, matching the
    common ROUGE preprocessing ("U.S. sent aid." -> u, s, sent, aid).
    Total function: empty or punctuation-only text gives ().
    """
    normalized = unicodedata.normalize("NFC", text).lower()
    tokens = _WORD_RE.findall(normalized)
    if config.stemming:
        # The reference ROUGE script leaves very short words unstemmed.
        tokens = [porter_stem(t) if len(t) > 3 else t for t in tokens]
    return tuple(tokens)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap ROUGE-N between two token sequences.

    If either side has no n-grams (shorter than n), every component is 0.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        return RougeScore(0.0, 0.0, 0.0)
    overlap = sum((cand & ref).values())
    precision = overlap / cand_total
    recall = overlap / ref_total
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return RougeScore(precision, recall, f1)


def sim(
    x1: Sequence[str],
    x2: Sequence[str],
    config: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """ROUGE-1 + ROUGE-2 similarity between two token sequences, in [0, 2]."""
    variant = config.rouge_variant
    return rouge_n(x1, x2, 1).component(variant) + rouge_n(x1, x2, 2).component(variant)


# ---------------------------------------------------------------------------
# Porter stemmer (classic 1980 algorithm). Self-contained because no
# stemming library is available in this environment; used only when
# MetricConfig.stemming is enabled.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    # Number of VC sequences in the [C](VC)^m[V] decomposition.
    forms = "".join("c" if _is_consonant(stem, i) else "v" for i in range(len(stem)))
    return len(re.findall(r"v+c+", forms))


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


_STEP2_SUFFIXES = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3_SUFFIXES = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4_SUFFIXES = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def porter_stem(word: str) -> str:
    """Porter-stem a lowercase word."""
    if len(word) <= 2:
        return word
    w = word

    # Step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif not w.endswith("ss") and w.endswith("s"):
        w = w[:-1]

    # Step 1b
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    else:
        flag = False
        if w.endswith("ed") and _contains_vowel(w[:-2]):
            w = w[:-2]
            flag = True
        elif w.endswith("ing") and _contains_vowel(w[:-3]):
            w = w[:-3]
            flag = True
        if flag:
            if w.endswith(("at", "bl", "iz")):
                w += "e"
            elif _ends_double_consonant(w) and not w.endswith(("l", "s", "z")):
                w = w[:-1]
            elif _measure(w) == 1 and _ends_cvc(w):
                w += "e"

    # Step 1c
    if w.endswith("y") and _contains_vowel(w[:-1]):
        w = w[:-1] + "i"

    # Step 2
    for suffix, repl in _STEP2_SUFFIXES:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                w = stem + repl
            break

    # Step 3
    for suffix, repl in _STEP3_SUFFIXES:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                w = stem + repl
            break

    # Step 4 ("ion" is special-cased: only removed after s or t)
    for suffix in _STEP4_SUFFIXES:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 1:
                w = stem
            break
    else:
        if w.endswith("ion") and len(w) > 3 and w[-4] in "st" and _measure(w[:-3]) > 1:
            w = w[:-3]

    # Step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            w = stem

    # Step 5b
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w
