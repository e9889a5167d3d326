"""Tiny transformer encoder-decoder.

Randomly initialized and desk-scale on purpose: the serving and training
plumbing is the deliverable, not summary quality. Checkpoints bundle the
model config, the vocabulary and the weights in one torch file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import torch
from torch import nn

from .vocab import Vocab


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    nhead: int = 4
    num_layers: int = 2
    dim_feedforward: int = 128
    dropout: float = 0.1
    max_len: int = 512  # positional capacity, encoder and decoder sides

    def __post_init__(self):
        if self.max_len < 2:
            raise ValueError("max_len must be at least 2")
        if self.d_model % self.nhead != 0:
            raise ValueError("d_model must be divisible by nhead")


class TinySeq2Seq(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.embed = nn.Embedding(config.vocab_size, config.d_model)
        self.pos = nn.Embedding(config.max_len, config.d_model)
        self.transformer = nn.Transformer(
            d_model=config.d_model,
            nhead=config.nhead,
            num_encoder_layers=config.num_layers,
            num_decoder_layers=config.num_layers,
            dim_feedforward=config.dim_feedforward,
            dropout=config.dropout,
            batch_first=True,
        )
        self.lm_head = nn.Linear(config.d_model, config.vocab_size)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        return self.embed(ids) + self.pos(positions)[None, :, :]

    def forward(
        self, src_ids: torch.Tensor, tgt_ids: torch.Tensor, pad_id: int
    ) -> torch.Tensor:
        """Teacher-forced logits over the target positions."""
        # boolean mask keeps dtype consistent with the padding masks
        causal = torch.triu(
            torch.ones(tgt_ids.shape[1], tgt_ids.shape[1], dtype=torch.bool,
                       device=tgt_ids.device),
            diagonal=1,
        )
        hidden = self.transformer(
            self._embed(src_ids),
            self._embed(tgt_ids),
            tgt_mask=causal,
            src_key_padding_mask=src_ids.eq(pad_id),
            tgt_key_padding_mask=tgt_ids.eq(pad_id),
            memory_key_padding_mask=src_ids.eq(pad_id),
        )
        return self.lm_head(hidden)

    @torch.no_grad()
    def greedy_generate(
        self,
        src_ids: torch.Tensor,
        vocab: Vocab,
        max_new_tokens: int = 64,
        min_new_tokens: int = 1,
    ) -> list[int]:
        """Greedy decode one sequence; EOS is suppressed before the
        minimum length so the output is never empty."""
        self.eval()
        out = [vocab.bos_id]
        limit = min(max_new_tokens, self.config.max_len - 1)
        for step in range(limit):
            tgt = torch.tensor([out], dtype=torch.long, device=src_ids.device)
            logits = self.forward(src_ids, tgt, vocab.pad_id)[0, -1]
            logits[vocab.pad_id] = float("-inf")
            logits[vocab.bos_id] = float("-inf")
            if step < min_new_tokens:
                logits[vocab.eos_id] = float("-inf")
            next_id = int(torch.argmax(logits).item())
            if next_id == vocab.eos_id:
                break
            out.append(next_id)
        return out[1:]


def save_checkpoint(path: str, model: TinySeq2Seq, vocab: Vocab) -> None:
    torch.save(
        {
            "model_config": dataclasses.asdict(model.config),
            "vocab": vocab.to_dict(),
            "state_dict": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path: str) -> tuple[TinySeq2Seq, Vocab]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = ModelConfig(**payload["model_config"])
    vocab = Vocab.from_dict(payload["vocab"])
    model = TinySeq2Seq(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, vocab
