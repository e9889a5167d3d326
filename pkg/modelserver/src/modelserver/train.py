"""Cross-entropy fine-tuning of the sidecar model on sample JSONL."""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import torch
from torch import nn

from .data import Sample, encode_input, encode_target, load_samples
from .model import ModelConfig, TinySeq2Seq, load_checkpoint, save_checkpoint
from .vocab import Vocab


@dataclass
class TrainConfig:
    samples_path: str
    checkpoint_path: str
    steps: int
    batch_size: int = 32
    learning_rate: float = 2e-5
    seed: int = 0
    max_input_tokens: int = 512
    max_target_tokens: int = 128
    init_checkpoint: Optional[str] = None
    model: ModelConfig = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrainResult:
    checkpoint_path: str
    losses: list[float]

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


def _pad_batch(rows: list[list[int]], pad_id: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([r + [pad_id] * (width - len(r)) for r in rows], dtype=torch.long)


def _batch_loss(
    model: TinySeq2Seq,
    vocab: Vocab,
    batch: Sequence[Sample],
    max_input_tokens: int,
    max_target_tokens: int,
) -> torch.Tensor:
    src = _pad_batch(
        [encode_input(vocab, s.input, max_input_tokens) for s in batch], vocab.pad_id
    )
    tgt = _pad_batch(
        [encode_target(vocab, s.target, max_target_tokens) for s in batch], vocab.pad_id
    )
    logits = model(src, tgt[:, :-1], vocab.pad_id)
    return nn.functional.cross_entropy(
        logits.reshape(-1, logits.shape[-1]),
        tgt[:, 1:].reshape(-1),
        ignore_index=vocab.pad_id,
    )


def evaluate_loss(
    model: TinySeq2Seq,
    vocab: Vocab,
    samples: Sequence[Sample],
    max_input_tokens: int = 512,
    max_target_tokens: int = 128,
    batch_size: int = 32,
) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for start in range(0, len(samples), batch_size):
            batch = samples[start : start + batch_size]
            loss = _batch_loss(model, vocab, batch, max_input_tokens, max_target_tokens)
            total += float(loss.item()) * len(batch)
            count += len(batch)
    return total / count


def finetune(config: TrainConfig) -> TrainResult:
    samples = load_samples(config.samples_path)
    random.seed(config.seed)
    torch.manual_seed(config.seed)
    if config.init_checkpoint:
        model, vocab = load_checkpoint(config.init_checkpoint)
    else:
        vocab = Vocab.build([s.input for s in samples] + [s.target for s in samples])
        if config.model is None:
            model_config = ModelConfig(vocab_size=len(vocab))
        else:
            model_config = dataclasses.replace(config.model, vocab_size=len(vocab))
        model = TinySeq2Seq(model_config)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    order = list(range(len(samples)))
    rng = random.Random(config.seed)
    rng.shuffle(order)
    cursor = 0
    losses: list[float] = []
    for _ in range(config.steps):
        batch = []
        for _ in range(min(config.batch_size, len(samples))):
            if cursor == len(order):
                rng.shuffle(order)
                cursor = 0
            batch.append(samples[order[cursor]])
            cursor += 1
        optimizer.zero_grad()
        loss = _batch_loss(
            model, vocab, batch, config.max_input_tokens, config.max_target_tokens
        )
        loss.backward()
        optimizer.step()
        losses.append(float(loss.item()))
    save_checkpoint(config.checkpoint_path, model, vocab)
    return TrainResult(checkpoint_path=config.checkpoint_path, losses=losses)
