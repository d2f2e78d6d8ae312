"""Method name suggestion with convolutional attention networks."""

import json

from ._codesum import (
    CodesumError,
    Model,
    Suggestion,
    build_corpus,
    exact_match,
    split_dataset,
    split_identifier,
    subtoken_prf,
    tokenize_snippet,
)
from ._codesum import default_config as _default_config
from ._codesum import train as _train

__all__ = [
    "CodesumError",
    "Model",
    "Suggestion",
    "build_corpus",
    "default_config",
    "exact_match",
    "split_dataset",
    "split_identifier",
    "subtoken_prf",
    "tokenize_snippet",
    "train",
]


def default_config(model="copy", preset=None):
    """Training configuration as a dict; preset="paper" loads the tuned values."""
    return json.loads(_default_config(preset or "", model))


def train(train_examples, valid_examples=(), config=None, on_epoch=None, **overrides):
    """Train a model. Keyword overrides are merged into config (or the defaults).

    on_epoch receives each epoch's log as a dict and may return False to stop.
    """
    cfg = dict(config) if config is not None else default_config(overrides.get("model_kind", "copy"))
    cfg.update(overrides)
    callback = None
    if on_epoch is not None:
        def callback(log):
            keep = on_epoch(json.loads(log))
            return True if keep is None else bool(keep)
    return _train(list(train_examples), list(valid_examples), json.dumps(cfg), callback)
