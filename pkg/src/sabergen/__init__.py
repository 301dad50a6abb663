"""Pitch-by-pitch baseball world model.

Structured game records are serialized to token sequences, a small
decoder-only transformer is trained on them from scratch, and
constrained decoding turns the trained model into pitch-type and
swing-decision predictors with a full evaluation harness.

Submodules load lazily so process-level knobs (for one, thread caps)
can be set before any numerics are imported.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = (
    "errors",
    "events",
    "codec",
    "ingest",
    "simulate",
    "model",
    "train",
    "predict",
    "evaluate",
    "report",
    "manifest",
    "cli",
)

__all__ = list(_SUBMODULES) + ["__version__"]


def __getattr__(name):
    if name in _SUBMODULES:
        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
