"""Next-token training loop: Adam, linear warmup, gradient clipping,
periodic checkpoints, and a recorded loss curve.

Training windows are fixed-width chunks one token wider than the model
context, so each window yields ``context_length`` (input, target) pairs.
Short final chunks are right-padded with PAD; padded targets are masked
out of the loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .codec import PAD, TokenSequence, Window, window
from .errors import ConfigError, TrainingError
from .model import (
    ModelConfig,
    init_params,
    loss_and_grads,
    save_checkpoint,
)
from .model import _forward, _masked_ce  # shared internals, same package

__all__ = [
    "TrainConfig",
    "TrainResult",
    "build_training_windows",
    "train",
    "evaluate_loss",
]


@dataclass(frozen=True)
class TrainConfig:
    steps: int
    batch_size: int = 16
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.95
    eps: float = 1e-8
    weight_decay: float = 0.0
    grad_clip: float = 1.0
    warmup_steps: int = 100
    seed: int = 0
    checkpoint_interval: int = 500

    def __post_init__(self) -> None:
        if self.steps < 1 or self.batch_size < 1:
            raise ConfigError("steps and batch_size must be >= 1")
        if min(self.lr, self.eps, self.grad_clip) <= 0:
            raise ConfigError("lr, eps, and grad_clip must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("betas must be in [0, 1)")
        if self.warmup_steps < 0 or self.weight_decay < 0 or self.checkpoint_interval < 1:
            raise ConfigError("warmup, weight decay, and checkpoint interval must be non-negative")


@dataclass
class TrainResult:
    params: dict[str, np.ndarray]
    model_config: ModelConfig
    train_config: TrainConfig
    loss_curve: list[float]
    eval_curve: list[tuple[int, float]] = field(default_factory=list)


def build_training_windows(
    seqs: Sequence[TokenSequence], context_length: int
) -> np.ndarray:
    """Pack serialized games into a [N, context_length + 1] int32 matrix.

    Each game is chunked independently (no cross-game packing); chunks
    shorter than the window are right-padded with PAD. Single-token
    tails are dropped: they contain no (input, target) pair.
    """
    width = context_length + 1
    rows = []
    for seq in seqs:
        for w in window(seq, width):
            if len(w.tokens) < 2:
                continue
            row = np.full(width, PAD, dtype=np.int32)
            row[: len(w.tokens)] = w.tokens
            rows.append(row)
    if not rows:
        raise ConfigError("no training windows: corpus is empty")
    return np.stack(rows)


def _batch_views(rows: np.ndarray):
    inputs = rows[:, :-1]
    targets = rows[:, 1:]
    mask = targets != PAD
    return inputs, targets, mask


def evaluate_loss(
    params,
    config: ModelConfig,
    windows: np.ndarray,
    batch_size: int = 16,
) -> float:
    """Mean next-token cross entropy (nats per predicted token) over a
    window matrix, exactly weighted by masked position counts."""
    total_nats = 0.0
    total_positions = 0
    for start in range(0, len(windows), batch_size):
        inputs, targets, mask = _batch_views(windows[start : start + batch_size])
        if not mask.any():
            continue
        logits, _ = _forward(params, config, inputs, need_cache=False)
        value, _, n = _masked_ce(logits, targets, mask)
        total_nats += float(value) * n
        total_positions += n
    if total_positions == 0:
        raise ConfigError("evaluation windows contain no predictable positions")
    return total_nats / total_positions


def train(
    windows: np.ndarray,
    model_config: ModelConfig,
    train_config: TrainConfig,
    checkpoint_path: Optional[Union[str, Path]] = None,
    eval_windows: Optional[np.ndarray] = None,
    init_seed: Optional[int] = None,
) -> TrainResult:
    """Train from scratch on pre-built windows.

    Fully deterministic given the seeds. A non-finite loss or gradient
    aborts with TrainingError; the checkpoint file, if any, keeps the
    last good parameters. Checkpoints are written every
    ``checkpoint_interval`` steps and at the end.
    """
    if windows.shape[1] != model_config.context_length + 1:
        raise ConfigError(
            f"windows are {windows.shape[1]} wide; expected context_length + 1 "
            f"= {model_config.context_length + 1}"
        )
    params = init_params(model_config, seed=train_config.seed if init_seed is None else init_seed)
    rng = np.random.default_rng(train_config.seed)
    drop_rng = (
        np.random.default_rng(train_config.seed ^ 0x5EED) if model_config.dropout > 0 else None
    )
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(vv) for k, vv in params.items()}
    loss_curve: list[float] = []
    eval_curve: list[tuple[int, float]] = []
    cfg = train_config

    def checkpoint(step: int) -> None:
        if checkpoint_path is not None:
            save_checkpoint(
                checkpoint_path,
                params,
                model_config,
                extra={"step": step, "loss": loss_curve[-1] if loss_curve else None},
            )

    for step in range(cfg.steps):
        idx = rng.integers(0, len(windows), cfg.batch_size)
        inputs, targets, mask = _batch_views(windows[idx])
        if not mask.any():
            loss_curve.append(loss_curve[-1] if loss_curve else 0.0)
            continue
        value, grads = loss_and_grads(params, model_config, inputs, targets, mask, drop_rng=drop_rng)
        if not np.isfinite(value):
            raise TrainingError(f"non-finite loss at step {step}; last checkpoint retained")
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise TrainingError(
                    f"non-finite gradient for {name} at step {step}; last checkpoint retained"
                )
        loss_curve.append(value)

        norm = float(np.sqrt(sum(float((g * g).sum()) for g in grads.values())))
        scale = cfg.grad_clip / norm if norm > cfg.grad_clip else 1.0
        lr = cfg.lr * min(1.0, (step + 1) / cfg.warmup_steps) if cfg.warmup_steps else cfg.lr
        t = step + 1
        bc1 = 1.0 - cfg.beta1**t
        bc2 = 1.0 - cfg.beta2**t
        for name, p in params.items():
            g = grads[name] * scale
            m[name] = cfg.beta1 * m[name] + (1.0 - cfg.beta1) * g
            v[name] = cfg.beta2 * v[name] + (1.0 - cfg.beta2) * (g * g)
            update = (m[name] / bc1) / (np.sqrt(v[name] / bc2) + cfg.eps)
            if cfg.weight_decay:
                update = update + cfg.weight_decay * p
            p -= (lr * update).astype(p.dtype)

        done = step + 1
        if done % cfg.checkpoint_interval == 0 or done == cfg.steps:
            checkpoint(done)
            if eval_windows is not None:
                eval_curve.append((done, evaluate_loss(params, model_config, eval_windows)))
    return TrainResult(params, model_config, cfg, loss_curve, eval_curve)
