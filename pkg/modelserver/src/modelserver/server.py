"""HTTP front for the sidecar: the summarization wire protocol.

POST /v1/generate {"events": [...], "context": "...",
"include_leading_mask": bool, "max_sentences": int|null}
-> 200 {"summary": "..."}; GET /v1/health -> 200 {"status": "ok"}.
All error bodies are {"error": "..."} with a 4xx/5xx status.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import torch
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .data import encode_input
from .model import TinySeq2Seq, load_checkpoint
from .vocab import MASK_TOKEN, SEG_TOKEN, Vocab

_SENT_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


@dataclass
class ServerConfig:
    checkpoint_path: str
    host: str = "127.0.0.1"
    port: int = 8080
    max_input_tokens: int = 3072  # capped by the model's positional capacity
    max_output_tokens: int = 64
    min_output_tokens: int = 1


class GenerateRequest(BaseModel):
    events: list[str]
    context: str
    include_leading_mask: bool = False
    max_sentences: Optional[int] = None


class GenerationEngine:
    def __init__(self, model: TinySeq2Seq, vocab: Vocab, config: ServerConfig):
        self.model = model
        self.vocab = vocab
        self.config = config
        self.input_budget = min(config.max_input_tokens, model.config.max_len)

    def serialize(self, request: GenerateRequest) -> str:
        prefix = " | ".join(request.events)
        context = request.context
        if request.include_leading_mask:
            context = f"{MASK_TOKEN} {context}"
        return f"{prefix} {SEG_TOKEN} {context}" if prefix else f"{SEG_TOKEN} {context}"

    def generate(self, request: GenerateRequest) -> str:
        ids = encode_input(self.vocab, self.serialize(request), self.input_budget)
        src = torch.tensor([ids], dtype=torch.long)
        out_ids = self.model.greedy_generate(
            src,
            self.vocab,
            max_new_tokens=self.config.max_output_tokens,
            min_new_tokens=self.config.min_output_tokens,
        )
        text = self.vocab.decode(out_ids)
        if request.max_sentences is not None:
            sentences = [s for s in _SENT_SPLIT_RE.split(text.strip()) if s]
            if len(sentences) > request.max_sentences:
                text = " ".join(sentences[: request.max_sentences])
        return text


def create_app(engine: GenerationEngine) -> FastAPI:
    app = FastAPI()

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.exception_handler(Exception)
    async def on_failure(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/generate")
    async def generate(request: GenerateRequest):
        if not request.context.strip():
            return JSONResponse(status_code=400, content={"error": "context must be nonempty"})
        if request.max_sentences is not None and request.max_sentences < 1:
            return JSONResponse(
                status_code=400, content={"error": "max_sentences must be positive"}
            )
        return {"summary": engine.generate(request)}

    return app


def build_engine(config: ServerConfig) -> GenerationEngine:
    model, vocab = load_checkpoint(config.checkpoint_path)
    return GenerationEngine(model, vocab, config)


def serve(config: ServerConfig) -> None:
    import uvicorn

    app = create_app(build_engine(config))
    uvicorn.run(app, host=config.host, port=config.port)
