"""Training-sample JSONL loading and input encoding.

Schema violations abort before any training happens. Input truncation
never touches the event prefix: only the context after the segment token
is shortened.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .vocab import SEG_TOKEN, Vocab


class SampleError(ValueError):
    """Invalid training-sample file."""


@dataclass(frozen=True)
class Sample:
    input: str
    target: str
    doc_id: str
    num_masked: int


def load_samples(path: str) -> list[Sample]:
    samples: list[Sample] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SampleError(f"{path}:{line_no}: not valid JSON: {exc}") from exc
            for key, kind in (("input", str), ("target", str), ("doc_id", str),
                              ("num_masked", int)):
                if key not in row:
                    raise SampleError(f"{path}:{line_no}: missing field {key!r}")
                if not isinstance(row[key], kind) or isinstance(row[key], bool):
                    raise SampleError(f"{path}:{line_no}: field {key!r} must be {kind.__name__}")
            if not row["input"] or not row["target"]:
                raise SampleError(f"{path}:{line_no}: input and target must be nonempty")
            if row["num_masked"] < 1:
                raise SampleError(f"{path}:{line_no}: num_masked must be >= 1")
            samples.append(
                Sample(
                    input=row["input"],
                    target=row["target"],
                    doc_id=row["doc_id"],
                    num_masked=row["num_masked"],
                )
            )
    if not samples:
        raise SampleError(f"{path}: no samples")
    return samples


def truncate_input(text: str, max_tokens: int) -> str:
    """Cap the whitespace-token length, shortening only the context part
    that follows the segment token."""
    tokens = text.split()
    if len(tokens) <= max_tokens:
        return " ".join(tokens)
    if SEG_TOKEN in tokens:
        boundary = tokens.index(SEG_TOKEN) + 1
        prefix, context = tokens[:boundary], tokens[boundary:]
        if len(prefix) >= max_tokens:
            return " ".join(prefix[:max_tokens])
        return " ".join(prefix + context[: max_tokens - len(prefix)])
    return " ".join(tokens[:max_tokens])


def encode_input(vocab: Vocab, text: str, max_tokens: int) -> list[int]:
    return vocab.encode(truncate_input(text, max_tokens))


def encode_target(vocab: Vocab, text: str, max_tokens: int) -> list[int]:
    ids = vocab.encode(text)[: max_tokens - 2]
    return [vocab.bos_id] + ids + [vocab.eos_id]
