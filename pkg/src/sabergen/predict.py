"""Pitch-type and swing prediction as constrained next-token decoding.

Each task fixes (a) where the context is cut inside the serialized
stream and (b) which answer tokens are admissible:

* pitch-type tasks cut before the target pitch's type value token, so
  the context carries no information about the target pitch;
* swing decision cuts after the target pitch's physics, location, and
  count fields, ending exactly at the swing field tag.

Answers are single vocabulary tokens, so constrained decoding is one
softmax over the admissible set. The binary fastball task coarsens the
same value-token distribution the multi-class task uses: its fastball
probability is the exact sum of the fastball-member probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .codec import PAD, Vocabulary, quantize_game, serialize_indexed
from .errors import ConfigError, DataError
from .events import GameRecord, PitchType, in_zone
from .model import ModelConfig, forward

__all__ = [
    "PredictionTask",
    "PredictionInstance",
    "Prediction",
    "DumpRecord",
    "task_labels",
    "build_instances",
    "predict",
    "predict_batch",
    "write_dump",
    "read_dump",
]

FASTBALL_LABEL = "fastball"
OFFSPEED_LABEL = "other"
SWING_LABEL = "swing"
TAKE_LABEL = "take"


class PredictionTask(Enum):
    PITCH_TYPE_BINARY = "pitch_type_binary"
    PITCH_TYPE_MULTI = "pitch_type_multi"
    SWING_DECISION = "swing_decision"


def task_labels(task: PredictionTask, vocab: Vocabulary) -> list[tuple[str, tuple[int, ...]]]:
    """Ordered (label, answer token ids) pairs for a task.

    Order is by lowest member token id, which makes the argmax tie-break
    (lowest token id wins) a plain first-wins scan.
    """
    if task is PredictionTask.PITCH_TYPE_MULTI:
        pairs = [(t.code, (vocab.pitch_type_id[t.code],)) for t in PitchType]
    elif task is PredictionTask.PITCH_TYPE_BINARY:
        fast = tuple(vocab.pitch_type_id[t.code] for t in PitchType if t.is_fastball)
        slow = tuple(vocab.pitch_type_id[t.code] for t in PitchType if not t.is_fastball)
        pairs = [(FASTBALL_LABEL, fast), (OFFSPEED_LABEL, slow)]
    elif task is PredictionTask.SWING_DECISION:
        pairs = [(TAKE_LABEL, (vocab.bool_id[False],)), (SWING_LABEL, (vocab.bool_id[True],))]
    else:
        raise ConfigError(f"unknown task {task!r}")
    if any(not ids for _, ids in pairs):
        raise ConfigError(f"task {task.value}: empty answer-token set under this vocabulary")
    return sorted(pairs, key=lambda kv: min(kv[1]))


@dataclass(frozen=True)
class PredictionInstance:
    """One conditional prediction problem cut from a serialized game."""

    game_id: str
    pa_id: str
    pitch_number: int
    context: tuple[int, ...]
    gold: str
    pitcher_id: str
    in_zone: bool
    arsenal_size: int


@dataclass(frozen=True)
class Prediction:
    label: str
    probs: tuple[float, ...]  # aligned with task_labels order


def _gold_label(task: PredictionTask, pitch) -> str:
    if task is PredictionTask.PITCH_TYPE_MULTI:
        return pitch.pitch_type.code
    if task is PredictionTask.PITCH_TYPE_BINARY:
        return FASTBALL_LABEL if pitch.pitch_type.is_fastball else OFFSPEED_LABEL
    return SWING_LABEL if pitch.swing else TAKE_LABEL


def build_instances(
    games: Sequence[GameRecord],
    task: PredictionTask,
    vocab: Vocabulary,
    context_length: int,
) -> list[PredictionInstance]:
    """One instance per pitch, in stream order.

    Games are quantized first so gold labels and zone flags describe
    exactly what the tokens describe. Contexts longer than
    ``context_length`` drop oldest tokens; the current plate appearance
    is always retained in full whenever it fits the budget.
    """
    if context_length < 2:
        raise ConfigError("context_length must be >= 2")
    quantized = [quantize_game(g, vocab.qspec) for g in games]
    # Arsenal size: distinct types a pitcher throws at least 5 times in
    # this corpus (the small floor suppresses spurious one-off codes).
    type_counts: dict[str, dict[str, int]] = {}
    for game in quantized:
        for pa in game.plate_appearances:
            seen = type_counts.setdefault(pa.pitcher_id, {})
            for pitch in pa.pitches:
                seen[pitch.pitch_type.code] = seen.get(pitch.pitch_type.code, 0) + 1
    arsenal = {
        pid: sum(1 for n in counts.values() if n >= 5)
        for pid, counts in type_counts.items()
    }

    instances: list[PredictionInstance] = []
    for game in quantized:
        seq, index = serialize_indexed(game, vocab)
        for pa, pa_idx in zip(game.plate_appearances, index.pas):
            for pitch, p_idx in zip(pa.pitches, pa_idx.pitches):
                cut = (
                    p_idx.swing_value
                    if task is PredictionTask.SWING_DECISION
                    else p_idx.type_value
                )
                start = max(0, cut - context_length)
                instances.append(
                    PredictionInstance(
                        game_id=game.context.game_id,
                        pa_id=pa.pa_id,
                        pitch_number=pitch.pitch_number,
                        context=seq.tokens[start:cut],
                        gold=_gold_label(task, pitch),
                        pitcher_id=pa.pitcher_id,
                        in_zone=in_zone(pitch),
                        arsenal_size=arsenal[pa.pitcher_id],
                    )
                )
    return instances


def _constrain(logits: np.ndarray, groups: list[tuple[str, tuple[int, ...]]]) -> Prediction:
    token_ids = [tid for _, ids in groups for tid in ids]
    picked = logits[np.asarray(token_ids)].astype(np.float64)
    picked -= picked.max()
    weights = np.exp(picked)
    weights /= weights.sum()
    probs = []
    pos = 0
    for _, ids in groups:
        probs.append(float(weights[pos : pos + len(ids)].sum()))
        pos += len(ids)
    best = 0
    for i in range(1, len(groups)):
        if probs[i] > probs[best]:
            best = i
    return Prediction(groups[best][0], tuple(probs))


def predict_batch(
    params,
    config: ModelConfig,
    instances: Sequence[PredictionInstance],
    task: PredictionTask,
    vocab: Vocabulary,
    batch_size: int = 64,
) -> list[Prediction]:
    """Order-preserving batched prediction, identical to one-at-a-time.

    Contexts are right-padded to the batch maximum; causal masking makes
    the logits at each context's final position independent of padding.
    """
    groups = task_labels(task, vocab)
    out: list[Prediction] = []
    for start in range(0, len(instances), batch_size):
        chunk = instances[start : start + batch_size]
        lengths = [len(inst.context) for inst in chunk]
        if min(lengths, default=1) < 1:
            raise ConfigError(f"instance {start + lengths.index(0)}: empty context")
        width = max(lengths)
        if width > config.context_length:
            raise ConfigError(
                f"instance context of {width} tokens exceeds model context {config.context_length}"
            )
        batch = np.full((len(chunk), width), PAD, dtype=np.int32)
        for i, inst in enumerate(chunk):
            batch[i, : lengths[i]] = inst.context
        logits = forward(params, config, batch)
        for i, inst in enumerate(chunk):
            out.append(_constrain(logits[i, lengths[i] - 1], groups))
    return out


def predict(
    params,
    config: ModelConfig,
    instance: PredictionInstance,
    task: PredictionTask,
    vocab: Vocabulary,
) -> Prediction:
    """Single-instance constrained prediction."""
    return predict_batch(params, config, [instance], task, vocab)[0]


@dataclass(frozen=True)
class DumpRecord:
    """One prediction joined with its instance metadata."""

    task: str
    game_id: str
    pa_id: str
    pitch_number: int
    pitcher_id: str
    arsenal_size: int
    in_zone: bool
    gold: str
    predicted: str
    probs: tuple[float, ...]


_DUMP_COLUMNS = (
    "task",
    "game_id",
    "pa_id",
    "pitch_number",
    "pitcher_id",
    "arsenal_size",
    "in_zone",
    "gold",
    "predicted",
    "probs",
)


def records_from(
    instances: Sequence[PredictionInstance],
    predictions: Sequence[Prediction],
    task: PredictionTask,
) -> list[DumpRecord]:
    if len(instances) != len(predictions):
        raise ConfigError("instances and predictions differ in length")
    return [
        DumpRecord(
            task=task.value,
            game_id=inst.game_id,
            pa_id=inst.pa_id,
            pitch_number=inst.pitch_number,
            pitcher_id=inst.pitcher_id,
            arsenal_size=inst.arsenal_size,
            in_zone=inst.in_zone,
            gold=inst.gold,
            predicted=pred.label,
            probs=pred.probs,
        )
        for inst, pred in zip(instances, predictions)
    ]


def write_dump(records: Sequence[DumpRecord], path: Union[str, Path]) -> None:
    """Tab-separated prediction dump, one row per instance, deterministic
    formatting (probabilities to 9 decimal places)."""
    lines = ["\t".join(_DUMP_COLUMNS)]
    for r in records:
        lines.append(
            "\t".join(
                (
                    r.task,
                    r.game_id,
                    r.pa_id,
                    str(r.pitch_number),
                    r.pitcher_id,
                    str(r.arsenal_size),
                    "1" if r.in_zone else "0",
                    r.gold,
                    r.predicted,
                    ",".join(f"{p:.9f}" for p in r.probs),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_dump(path: Union[str, Path]) -> list[DumpRecord]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or tuple(lines[0].split("\t")) != _DUMP_COLUMNS:
        raise DataError(f"{path}: not a prediction dump (bad header)")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != len(_DUMP_COLUMNS):
            raise DataError(f"{path}:{lineno}: expected {len(_DUMP_COLUMNS)} columns")
        try:
            records.append(
                DumpRecord(
                    task=parts[0],
                    game_id=parts[1],
                    pa_id=parts[2],
                    pitch_number=int(parts[3]),
                    pitcher_id=parts[4],
                    arsenal_size=int(parts[5]),
                    in_zone=parts[6] == "1",
                    gold=parts[7],
                    predicted=parts[8],
                    probs=tuple(float(p) for p in parts[9].split(",")),
                )
            )
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    return records
