"""Dependency-parse ingestion and verb-centric event extraction.

Events are short phrases anchored on a non-auxiliary verb, found by
matching syntactic patterns against the verb's dependents. Patterns are
loaded from a small line-based DSL so new ones can be added without code
changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Optional, Sequence


class ConlluError(ValueError):
    """Malformed CoNLL-U input."""


class PatternError(ValueError):
    """Invalid pattern DSL file."""


@dataclass(frozen=True)
class ParsedToken:
    form: str
    lemma: str
    upos: str
    head: int  # 0 = root
    deprel: str


@dataclass(frozen=True)
class ParsedSentence:
    tokens: tuple[ParsedToken, ...]
    text: str
    index: int


@dataclass(frozen=True)
class ParsedDocument:
    id: str
    sentences: tuple[ParsedSentence, ...]
    references: Optional[tuple[str, ...]] = None

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.sentences)


@dataclass(frozen=True)
class EventPattern:
    id: str
    # (role, relation) pairs; the single center slot is ("v1", "center").
    slots: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Event:
    text: str
    sentence_index: int
    pattern_id: str
    token_indices: tuple[int, ...]


@dataclass
class ConlluParse:
    documents: list[ParsedDocument]
    warnings: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# CoNLL-U reading
# ---------------------------------------------------------------------------

def parse_conllu(stream: IO[str] | Iterable[str]) -> ConlluParse:
    """Read CoNLL-U into documents split on ``# newdoc id =`` comments.

    Multiword-token ranges (ids like ``3-4``) and empty nodes (``3.1``)
    are skipped. Sentences without a unique root or with a head cycle are
    dropped and reported in the result's warnings.
    """
    documents: list[ParsedDocument] = []
    warnings: list[str] = []
    cur_doc_id: Optional[str] = None
    cur_sents: list[ParsedSentence] = []
    cur_tokens: list[tuple[int, ParsedToken]] = []
    cur_text = ""
    sent_start_line = 0

    def flush_sentence(line_no: int):
        nonlocal cur_tokens, cur_text
        if not cur_tokens:
            return
        tokens = _validate_sentence(cur_tokens, sent_start_line, warnings)
        if tokens is not None:
            text = cur_text or " ".join(t.form for t in tokens)
            cur_sents.append(ParsedSentence(tokens=tokens, text=text, index=len(cur_sents)))
        cur_tokens = []
        cur_text = ""

    def flush_document():
        nonlocal cur_sents
        if cur_doc_id is not None or cur_sents:
            documents.append(
                ParsedDocument(id=cur_doc_id or f"doc{len(documents)}", sentences=tuple(cur_sents))
            )
        cur_sents = []

    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush_sentence(line_no)
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("newdoc"):
                flush_sentence(line_no)
                flush_document()
                cur_doc_id = comment.split("=", 1)[1].strip() if "=" in comment else None
            elif comment.startswith("text") and "=" in comment and not cur_tokens:
                cur_text = comment.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"line {line_no}: expected 10 tab-separated columns, got {len(cols)}")
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue  # multiword range / empty node
        if not cur_tokens:
            sent_start_line = line_no
        try:
            idx = int(tok_id)
            head = int(cols[6]) if cols[6] != "_" else 0
        except ValueError as exc:
            raise ConlluError(f"line {line_no}: non-integer token id or head: {line!r}") from exc
        deprel = cols[7]
        if not deprel or deprel == "_":
            raise ConlluError(f"line {line_no}: missing deprel")
        cur_tokens.append(
            (idx, ParsedToken(form=cols[1], lemma=cols[2], upos=cols[3], head=head, deprel=deprel))
        )
    flush_sentence(0)
    flush_document()
    return ConlluParse(documents=documents, warnings=warnings)


def _validate_sentence(
    indexed: list[tuple[int, ParsedToken]], start_line: int, warnings: list[str]
) -> Optional[tuple[ParsedToken, ...]]:
    n = len(indexed)
    ids = [i for i, _ in indexed]
    if ids != list(range(1, n + 1)):
        warnings.append(f"sentence at line {start_line}: token ids not contiguous from 1; dropped")
        return None
    tokens = tuple(t for _, t in indexed)
    roots = [t for t in tokens if t.head == 0]
    if len(roots) != 1:
        warnings.append(f"sentence at line {start_line}: {len(roots)} root tokens; dropped")
        return None
    for t in tokens:
        if t.head < 0 or t.head > n:
            warnings.append(f"sentence at line {start_line}: head index out of range; dropped")
            return None
    # cycle check by walking to root from every token
    for start in range(n):
        seen = set()
        cur = start + 1
        while cur != 0:
            if cur in seen:
                warnings.append(f"sentence at line {start_line}: head cycle; dropped")
                return None
            seen.add(cur)
            cur = tokens[cur - 1].head
    return tokens


def load_conllu(path: str) -> ConlluParse:
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh)


# ---------------------------------------------------------------------------
# Pattern DSL
# ---------------------------------------------------------------------------

_ROLES = {"n1", "n2", "a", "v1", "v2"}

# Accepted relation labels (UD v1 style plus common v2 spellings, which are
# normalized onto the v1 names when patterns and token deprels are read).
_KNOWN_RELATIONS = {
    "nsubj", "nsubjpass", "dobj", "iobj", "csubj", "ccomp", "xcomp", "advcl",
    "acl", "relcl", "amod", "advmod", "compound", "flat", "conj", "cc", "det",
    "case", "obl", "nmod", "mark", "aux", "auxpass", "cop", "prt", "attr",
    "dep", "expl", "nummod", "appos", "prep", "pobj", "agent", "acomp", "oprd",
}

_REL_ALIASES = {
    "nsubj:pass": "nsubjpass",
    "obj": "dobj",
    "aux:pass": "auxpass",
    "compound:prt": "prt",
    "acl:relcl": "relcl",
    "csubj:pass": "csubjpass",
    "obl:agent": "agent",
    "flat:name": "flat",
}


def _norm_rel(deprel: str) -> str:
    base = deprel.lower()
    if base in _REL_ALIASES:
        return _REL_ALIASES[base]
    # unknown subtypes fall back to the bare relation
    if ":" in base:
        head = base.split(":", 1)[0]
        return _REL_ALIASES.get(head, head)
    return base


def parse_pattern_line(line: str, line_no: int) -> EventPattern:
    if ":=" not in line:
        raise PatternError(f"line {line_no}: expected 'id := slot, slot, ...'")
    pid, slot_part = (part.strip() for part in line.split(":=", 1))
    if not pid:
        raise PatternError(f"line {line_no}: empty pattern id")
    slots: list[tuple[str, str]] = []
    centers = 0
    for chunk in slot_part.split(","):
        chunk = chunk.strip()
        if "@" not in chunk:
            raise PatternError(f"line {line_no}: slot {chunk!r} is not ROLE@RELATION")
        role, rel = (p.strip() for p in chunk.split("@", 1))
        if role not in _ROLES:
            raise PatternError(f"line {line_no}: unknown role {role!r}")
        if rel == "center":
            if role != "v1":
                raise PatternError(f"line {line_no}: center slot must have role v1")
            centers += 1
        elif _norm_rel(rel) not in _KNOWN_RELATIONS:
            raise PatternError(f"line {line_no}: unknown relation label {rel!r}")
        slots.append((role, rel if rel == "center" else _norm_rel(rel)))
    if centers != 1:
        raise PatternError(f"line {line_no}: pattern must have exactly one v1@center slot")
    return EventPattern(id=pid, slots=tuple(slots))


def load_patterns(source: str | IO[str]) -> list[EventPattern]:
    """Load patterns from a DSL file path or open stream."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            lines = fh.readlines()
    else:
        lines = list(source)
    patterns: list[EventPattern] = []
    seen = set()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        pattern = parse_pattern_line(line, line_no)
        if pattern.id in seen:
            raise PatternError(f"line {line_no}: duplicate pattern id {pattern.id!r}")
        seen.add(pattern.id)
        patterns.append(pattern)
    return patterns


def default_patterns() -> list[EventPattern]:
    """The built-in pattern file: the five published patterns plus a
    bare-verb pattern so that verbs with no matchable arguments still
    yield an event (e.g. *send* inside a relative clause)."""
    text = resources.files("eventsum.data").joinpath("default_patterns.txt").read_text("utf-8")
    return load_patterns(iter(text.splitlines(keepends=True)))


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

_AUX_LEMMAS = {
    "be", "have", "do", "will", "would", "can", "could",
    "may", "might", "shall", "should", "must",
}
_NOUN_UPOS = {"NOUN", "PROPN", "PRON", "NUM"}
_WH_PRONOUNS = {"that", "which", "who", "whom", "what", "whose"}


class _SentenceView:
    """Index structure over one sentence for pattern matching."""

    def __init__(self, sentence: ParsedSentence):
        self.sentence = sentence
        self.tokens = sentence.tokens
        self.children: dict[int, list[int]] = {i: [] for i in range(1, len(self.tokens) + 1)}
        for i, tok in enumerate(self.tokens, start=1):
            if tok.head != 0:
                self.children[tok.head].append(i)

    def token(self, i: int) -> ParsedToken:
        return self.tokens[i - 1]

    def deps(self, i: int, rel: str) -> list[int]:
        return [c for c in self.children.get(i, []) if _norm_rel(self.token(c).deprel) == rel]

    def first_dep(self, i: int, rel: str, upos: Optional[set] = None) -> Optional[int]:
        for c in self.deps(i, rel):
            if upos is None or self.token(c).upos in upos:
                return c
        return None


def _is_centric_verb(tok: ParsedToken) -> bool:
    if tok.upos != "VERB":
        return False
    if _norm_rel(tok.deprel) in {"aux", "auxpass", "cop"}:
        return False
    # fallback for parsers that tag auxiliaries as plain verbs
    return tok.lemma.lower() not in _AUX_LEMMAS


def _acceptable_noun(tok: ParsedToken) -> bool:
    if tok.upos not in _NOUN_UPOS:
        return False
    if tok.upos == "PRON" and tok.lemma.lower() in _WH_PRONOUNS:
        return False
    return True


def _find_subject(view: _SentenceView, verb_idx: int, rel: str) -> Optional[int]:
    """Bind a subject slot. Direct dependents first; for bare participles
    the subject is inherited through advcl (matrix subject) or xcomp
    (matrix object, i.e. object control)."""
    for c in view.deps(verb_idx, rel):
        if _acceptable_noun(view.token(c)):
            return c
    if rel != "nsubj":
        return None
    cur = verb_idx
    for _ in range(len(view.tokens)):
        tok = view.token(cur)
        parent = tok.head
        if parent == 0:
            return None
        link = _norm_rel(tok.deprel)
        if link == "xcomp":
            for candidate_rel in ("dobj", "nsubj"):
                for c in view.deps(parent, candidate_rel):
                    if _acceptable_noun(view.token(c)):
                        return c
        elif link == "advcl":
            for c in view.deps(parent, "nsubj"):
                if _acceptable_noun(view.token(c)):
                    return c
        else:
            return None
        cur = parent
    return None


def _render_lemma(tok: ParsedToken) -> str:
    return tok.lemma if tok.lemma and tok.lemma != "_" else tok.form


def _render_noun_lemma(tok: ParsedToken) -> str:
    # keep the surface capitalization ("Police want ..." not "police want ...")
    lemma = _render_lemma(tok)
    if tok.form[:1].isupper() and lemma[:1].islower():
        return lemma[0].upper() + lemma[1:]
    return lemma


def _render_noun(view: _SentenceView, idx: int) -> tuple[str, list[int]]:
    """Noun slot: head lemma plus name parts (flat), numeric modifiers,
    and conjoined nouns with their coordinators. Determiners and
    adjectival/compound modifiers are dropped."""
    parts: list[tuple[int, str]] = []

    def add_head(i: int):
        parts.append((i, _render_noun_lemma(view.token(i))))
        for c in view.children.get(i, []):
            rel = _norm_rel(view.token(c).deprel)
            if rel == "flat":
                parts.append((c, _render_noun_lemma(view.token(c))))
            elif rel == "nummod":
                parts.append((c, view.token(c).form))
            elif rel == "cc":
                parts.append((c, view.token(c).form))
            elif rel == "conj" and _acceptable_noun(view.token(c)):
                add_head(c)

    add_head(idx)
    parts.sort()
    return " ".join(text for _, text in parts), [i for i, _ in parts]


def _render_verb(view: _SentenceView, idx: int, with_to: bool = False) -> tuple[str, list[int]]:
    """Verb slot: lemma plus any particle; optional infinitive marker."""
    parts: list[tuple[int, str]] = [(idx, _render_lemma(view.token(idx)))]
    indices = [idx]
    for c in view.deps(idx, "prt"):
        parts.append((c, view.token(c).form))
        indices.append(c)
    if with_to:
        for c in view.deps(idx, "mark"):
            if view.token(c).form.lower() == "to":
                parts.insert(0, (c, view.token(c).form.lower()))
                indices.append(c)
                break
    parts.sort()
    return " ".join(text for _, text in parts), indices


def _match_pattern(
    view: _SentenceView, verb_idx: int, pattern: EventPattern
) -> Optional[tuple[list[str], list[int]]]:
    """Try to bind every slot of ``pattern`` around the centric verb.

    Returns the rendered slot texts (in slot order) and the consumed token
    indices, or None if any slot cannot be bound.
    """
    rendered: list[str] = []
    used: list[int] = []
    governor = verb_idx
    passive = any(slot[1] == "nsubjpass" for slot in pattern.slots)
    for role, rel in pattern.slots:
        if rel == "center":
            text, idxs = _render_verb(view, verb_idx)
            if passive:
                text = "be " + text
            rendered.append(text)
            used.extend(idxs)
            governor = verb_idx
            continue
        nrel = _norm_rel(rel)
        if role in {"n1", "n2"}:
            if nrel in {"nsubj", "nsubjpass"}:
                bound = _find_subject(view, verb_idx, nrel)
            else:
                bound = None
                for c in view.deps(governor, nrel):
                    if _acceptable_noun(view.token(c)):
                        bound = c
                        break
            if bound is None:
                return None
            text, idxs = _render_noun(view, bound)
            rendered.append(text)
            used.extend(idxs)
        elif role == "a":
            bound = view.first_dep(governor, nrel, {"ADJ"})
            if bound is None:
                return None
            rendered.append(view.token(bound).form)
            used.append(bound)
        elif role in {"v2"}:
            bound = view.first_dep(governor, nrel, {"VERB"})
            if bound is None:
                return None
            text, idxs = _render_verb(view, bound, with_to=True)
            rendered.append(text)
            used.extend(idxs)
            governor = bound
        else:  # pragma: no cover - roles are validated at load time
            return None
    return rendered, sorted(set(used))


def extract_events(sentence: ParsedSentence, patterns: Sequence[EventPattern]) -> list[Event]:
    """Extract one event per non-auxiliary verb using the longest
    fully-bound pattern (most slots; ties break by pattern order)."""
    view = _SentenceView(sentence)
    events: list[Event] = []
    for idx in range(1, len(sentence.tokens) + 1):
        tok = view.token(idx)
        if not _is_centric_verb(tok):
            continue
        best: Optional[tuple[int, int, EventPattern, list[str], list[int]]] = None
        for order, pattern in enumerate(patterns):
            match = _match_pattern(view, idx, pattern)
            if match is None:
                continue
            rendered, used = match
            key = (len(pattern.slots), -order)
            if best is None or key > (best[0], best[1]):
                best = (len(pattern.slots), -order, pattern, rendered, used)
        if best is None:
            continue
        _, _, pattern, rendered, used = best
        text = " ".join(rendered).strip()
        if not text:
            continue
        events.append(
            Event(
                text=text,
                sentence_index=sentence.index,
                pattern_id=pattern.id,
                token_indices=tuple(used),
            )
        )
    return events


def extract_document_events(doc: ParsedDocument, patterns: Sequence[EventPattern]) -> list[Event]:
    out: list[Event] = []
    for sentence in doc.sentences:
        out.extend(extract_events(sentence, patterns))
    return out


def events_to_jsonl(doc_id: str, events: Iterable[Event]) -> str:
    lines = [
        json.dumps(
            {
                "doc_id": doc_id,
                "sentence_index": e.sentence_index,
                "pattern_id": e.pattern_id,
                "text": e.text,
            },
            ensure_ascii=False,
        )
        for e in events
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def document_from_text(doc_id: str, sentences: Sequence[str], references=None) -> ParsedDocument:
    """Build a document without dependency annotation (selector-only use;
    such documents contain no verbs and therefore yield no events)."""
    parsed = []
    for i, text in enumerate(sentences):
        words = text.split() or [""]
        tokens = tuple(
            ParsedToken(form=w, lemma=w.lower(), upos="X", head=0 if j == 0 else 1, deprel="root" if j == 0 else "dep")
            for j, w in enumerate(words)
        )
        parsed.append(ParsedSentence(tokens=tokens, text=text, index=i))
    refs = tuple(references) if references is not None else None
    return ParsedDocument(id=doc_id, sentences=tuple(parsed), references=refs)
