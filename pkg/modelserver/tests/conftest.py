import json
import random

import pytest

from modelserver import ModelConfig, TrainConfig, finetune

SUBJECTS = ["alice", "bob", "mara", "iris", "tomas", "lena"]
VERBS = ["build", "repair", "visit", "paint", "guard", "clean"]
OBJECTS = ["house", "bridge", "garden", "boat", "tower", "wall"]


def synthetic_samples(n, seed=0):
    """Sample rows in the training JSONL schema, masked-sentence style."""
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        triples = [
            (rng.choice(SUBJECTS), rng.choice(VERBS), rng.choice(OBJECTS)) for _ in range(3)
        ]
        sentences = [" ".join(t) + " ." for t in triples]
        masked = rng.randrange(3)
        events = " ".join(triples[masked])
        context = " ".join(
            "⟨mask⟩" if j == masked else s for j, s in enumerate(sentences)
        )
        rows.append(
            {
                "input": f"{events} ⟨seg⟩ {context}",
                "target": sentences[masked],
                "doc_id": f"doc{i}",
                "num_masked": 1,
            }
        )
    return rows


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    return str(path)


TINY_MODEL = ModelConfig(vocab_size=0, d_model=32, nhead=2, num_layers=1,
                         dim_feedforward=64, dropout=0.0, max_len=64)


def tiny_train_config(samples_path, checkpoint_path, **overrides):
    # vocab_size is replaced with the built vocabulary's size by finetune
    defaults = dict(
        samples_path=samples_path,
        checkpoint_path=checkpoint_path,
        steps=1,
        batch_size=4,
        learning_rate=1e-3,
        seed=0,
        max_input_tokens=48,
        max_target_tokens=16,
        model=TINY_MODEL,
    )
    defaults.update(overrides)
    return TrainConfig(**defaults)


@pytest.fixture(scope="session")
def trained_checkpoint(tmp_path_factory):
    """A briefly trained checkpoint shared by the serving tests."""
    tmp = tmp_path_factory.mktemp("checkpoint")
    samples_path = write_jsonl(tmp / "samples.jsonl", synthetic_samples(24, seed=1))
    config = tiny_train_config(samples_path, str(tmp / "model.pt"), steps=5)
    return finetune(config).checkpoint_path
