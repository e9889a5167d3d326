"""Command line: ``modelserver finetune`` and ``modelserver serve``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .server import ServerConfig, serve
from .train import TrainConfig, finetune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modelserver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="cross-entropy training on sample JSONL")
    p.add_argument("--samples", required=True)
    p.add_argument("--checkpoint", required=True, help="output checkpoint path")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=2e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init-checkpoint", default=None)

    p = sub.add_parser("serve", help="serve the generation wire protocol")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--max-input-tokens", type=int, default=3072)
    p.add_argument("--max-output-tokens", type=int, default=64)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "finetune":
        result = finetune(
            TrainConfig(
                samples_path=args.samples,
                checkpoint_path=args.checkpoint,
                steps=args.steps,
                batch_size=args.batch_size,
                learning_rate=args.learning_rate,
                seed=args.seed,
                init_checkpoint=args.init_checkpoint,
            )
        )
        print(f"saved {result.checkpoint_path}; final loss {result.final_loss:.4f}")
        return 0
    serve(
        ServerConfig(
            checkpoint_path=args.checkpoint,
            host=args.host,
            port=args.port,
            max_input_tokens=args.max_input_tokens,
            max_output_tokens=args.max_output_tokens,
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
