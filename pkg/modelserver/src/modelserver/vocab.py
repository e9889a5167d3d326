"""Whitespace word-level vocabulary.

The wire format keeps the special tokens whitespace-separated, so plain
splitting is a faithful tokenizer for it. Specials occupy the first ids.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable

PAD_TOKEN = "⟨pad⟩"
BOS_TOKEN = "⟨bos⟩"
EOS_TOKEN = "⟨eos⟩"
UNK_TOKEN = "⟨unk⟩"
SEG_TOKEN = "⟨seg⟩"
MASK_TOKEN = "⟨mask⟩"

SPECIAL_TOKENS = [PAD_TOKEN, BOS_TOKEN, EOS_TOKEN, UNK_TOKEN, SEG_TOKEN, MASK_TOKEN]


class Vocab:
    def __init__(self, tokens: list[str]):
        if tokens[: len(SPECIAL_TOKENS)] != SPECIAL_TOKENS:
            raise ValueError("vocabulary must start with the special tokens")
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return self.index[PAD_TOKEN]

    @property
    def bos_id(self) -> int:
        return self.index[BOS_TOKEN]

    @property
    def eos_id(self) -> int:
        return self.index[EOS_TOKEN]

    @property
    def unk_id(self) -> int:
        return self.index[UNK_TOKEN]

    @classmethod
    def build(cls, texts: Iterable[str], max_size: int = 8000) -> "Vocab":
        counts = Counter()
        for text in texts:
            counts.update(text.split())
        kept = [
            tok
            for tok, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
            if tok not in SPECIAL_TOKENS
        ]
        room = max(0, max_size - len(SPECIAL_TOKENS))
        return cls(SPECIAL_TOKENS + kept[:room])

    def encode(self, text: str) -> list[int]:
        unk = self.unk_id
        return [self.index.get(tok, unk) for tok in text.split()]

    def decode(self, ids: Iterable[int]) -> str:
        skip = {self.pad_id, self.bos_id, self.eos_id}
        return " ".join(self.tokens[i] for i in ids if i not in skip)

    def to_dict(self) -> dict:
        return {"tokens": self.tokens}

    @classmethod
    def from_dict(cls, payload: dict) -> "Vocab":
        return cls(list(payload["tokens"]))
