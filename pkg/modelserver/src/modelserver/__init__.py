"""Seq2seq sidecar for event-hinted summarization."""

from .data import Sample, SampleError, load_samples, truncate_input
from .model import ModelConfig, TinySeq2Seq, load_checkpoint, save_checkpoint
from .server import GenerationEngine, ServerConfig, build_engine, create_app, serve
from .train import TrainConfig, TrainResult, evaluate_loss, finetune
from .vocab import MASK_TOKEN, SEG_TOKEN, Vocab

__version__ = "0.1.0"
