"""
Shared fixtures: a down-scaled architecture and small labeled corpora.
"""

import numpy as np
import pytest

from hyperhate.models.example import HATE, NON_HATE, Dataset, Example

# Same graph as the full model with C=8, k=3, L=12; the alphabet fixes 70 embedding rows.
SMALL_BACKBONE = {
    "vocab_rows": 70,
    "embed_dim": 5,
    "seq_len": 12,
    "kernel": 3,
    "channels": 8,
    "pool": 2,
    "fc_sizes": [6, 4, 1],
    "fc_dropout": 0.5,
    "pad_index": 70,
}

SMALL_ARCHITECTURES = {
    "plain": {"backbone": SMALL_BACKBONE},
    "static": {"backbone": SMALL_BACKBONE, "aux": {"z_dim": 3, "layers": 2}},
    "dynamic": {"backbone": SMALL_BACKBONE,
                "aux": {"z_dim": 3, "layers": 2, "gru_hidden": 4, "recurrent_dropout": 0.1}},
    "cnngru": {"cnngru": {"embed_dim": 4, "max_tokens": 10, "filters": 3, "kernel": 2,
                          "pool": 2, "gru_hidden": 3, "min_count": 1, "vocab_size": 50}},
}

HATE_TEXTS = ["zqx ab", "cd zqx", "zqx zqx", "e zqx f", "zqx", "gh zqx i",
              "zqx kl", "m zqx", "zqx no", "pr zqx"]
NON_HATE_TEXTS = ["ab cd", "ef gh", "ik lm", "no pr", "st uv", "wy ab",
                  "cd ef", "gh ik", "lm no", "pr st"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_architectures():
    return SMALL_ARCHITECTURES


@pytest.fixture
def short_dataset():
    """20 short examples separable by the "zqx" marker, classes interleaved."""
    examples = []
    for hate, non_hate in zip(HATE_TEXTS, NON_HATE_TEXTS):
        examples.append(Example(text=hate, label=HATE))
        examples.append(Example(text=non_hate, label=NON_HATE))
    return Dataset(name="short", examples=tuple(examples))


@pytest.fixture
def write_csv(tmp_path):
    """Write a text,label csv under tmp_path and return its path."""
    def _write(name, rows, header="text,label"):
        path = tmp_path / name
        path.write_text(header + "\n" + "".join(r + "\n" for r in rows), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def lift_zeros():
    """
    Move every all-zero parameter tensor (biases, the output layer) to small
    positive values, so predictions depend on the input and finite
    differences stay clear of the ReLU kink at zero.
    """
    def _lift(model, rng):
        for param in model.parameters().values():
            if not np.any(param.value):
                param.value = rng.uniform(0.05, 0.2, size=param.shape)
        return model
    return _lift
