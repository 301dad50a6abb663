"""Training loop tests: window packing, memorization, determinism, aborts."""

import numpy as np
import pytest

from sabergen.codec import PAD, TokenSequence, window
from sabergen.errors import CheckpointError, ConfigError, TrainingError
from sabergen.model import ModelConfig, forward, load_checkpoint, loss
from sabergen.train import (
    TrainConfig,
    TrainResult,
    build_training_windows,
    evaluate_loss,
    train,
)


def seq_of(tokens):
    return TokenSequence(tokens=tuple(tokens), provenance="synthetic")


def cycle_corpus(length=100, period=3):
    # deterministic cycle 1, 2, ..., period, 1, 2, ...: fully predictable
    return [seq_of([1 + (i % period) for i in range(length)])]


MEMO_MODEL = ModelConfig(vocab_size=8, dim=32, layers=1, heads=2, context_length=8)


class TestBuildWindows:
    def test_shape_and_dtype(self):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        assert rows.shape[1] == MEMO_MODEL.context_length + 1
        assert rows.dtype == np.int32

    def test_row_count_matches_window_law(self):
        rng = np.random.default_rng(0)
        seqs = [seq_of(rng.integers(1, 7, size=n)) for n in (5, 9, 10, 27, 2)]
        rows = build_training_windows(seqs, 8)
        expected = sum(
            1 for s in seqs for w in window(s, 9) if len(w.tokens) >= 2
        )
        assert len(rows) == expected

    def test_reassembly_per_sequence(self):
        # strip padding from each sequence's rows and get the sequence back
        rng = np.random.default_rng(1)
        seqs = [seq_of(rng.integers(1, 7, size=n)) for n in (23, 9, 14)]
        rows = build_training_windows(seqs, 8)
        i = 0
        for s in seqs:
            n_rows = sum(1 for w in window(s, 9) if len(w.tokens) >= 2)
            flat = [t for row in rows[i : i + n_rows] for t in row if t != PAD]
            usable = len(s.tokens) - (1 if len(s.tokens) % 9 == 1 else 0)
            assert tuple(flat) == s.tokens[:usable]
            i += n_rows
        assert i == len(rows)

    def test_single_token_tail_dropped(self):
        rows = build_training_windows([seq_of([1] * 19)], 8)  # 9 + 9 + 1
        assert len(rows) == 2
        assert not np.any(rows == PAD)

    def test_padding_only_in_final_chunk(self):
        rows = build_training_windows([seq_of([3] * 12)], 8)  # 9 + 3
        assert len(rows) == 2
        assert not np.any(rows[0] == PAD)
        assert list(rows[1][:3]) == [3, 3, 3]
        assert np.all(rows[1][3:] == PAD)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ConfigError):
            build_training_windows([], 8)

    def test_all_tails_rejected(self):
        with pytest.raises(ConfigError):
            build_training_windows([seq_of([1])], 8)


class TestTrainConfig:
    def test_rejects_bad_steps(self):
        with pytest.raises(ConfigError):
            TrainConfig(steps=0)

    def test_rejects_bad_lr(self):
        with pytest.raises(ConfigError):
            TrainConfig(steps=1, lr=0.0)

    def test_rejects_bad_betas(self):
        with pytest.raises(ConfigError):
            TrainConfig(steps=1, beta1=1.0)
        with pytest.raises(ConfigError):
            TrainConfig(steps=1, beta2=-0.1)

    def test_rejects_bad_checkpoint_interval(self):
        with pytest.raises(ConfigError):
            TrainConfig(steps=1, checkpoint_interval=0)

    def test_rejects_negative_weight_decay(self):
        with pytest.raises(ConfigError):
            TrainConfig(steps=1, weight_decay=-1e-4)


class TestTraining:
    def memo_train(self, steps=400, **kwargs):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        config = TrainConfig(
            steps=steps,
            batch_size=8,
            lr=3e-3,
            warmup_steps=20,
            seed=3,
            checkpoint_interval=100,
            **kwargs,
        )
        return rows, train(rows, MEMO_MODEL, config)

    def test_memorizes_a_cycle(self):
        rows, result = self.memo_train()
        assert isinstance(result, TrainResult)
        final = evaluate_loss(result.params, MEMO_MODEL, rows)
        assert final < 0.05, final
        # loss curve should actually descend
        assert result.loss_curve[-1] < 0.2 * result.loss_curve[0]

    def test_curve_lengths(self):
        _, result = self.memo_train(steps=250)
        assert len(result.loss_curve) == 250
        assert all(np.isfinite(v) for v in result.loss_curve)

    def test_deterministic(self):
        _, a = self.memo_train(steps=60)
        _, b = self.memo_train(steps=60)
        assert a.loss_curve == b.loss_curve
        for name in a.params:
            assert np.array_equal(a.params[name], b.params[name])

    def test_seed_changes_run(self):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        a = train(rows, MEMO_MODEL, TrainConfig(steps=30, seed=1))
        b = train(rows, MEMO_MODEL, TrainConfig(steps=30, seed=2))
        assert a.loss_curve != b.loss_curve

    def test_init_seed_defaults_to_train_seed(self):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        config = TrainConfig(steps=25, seed=9)
        a = train(rows, MEMO_MODEL, config)
        b = train(rows, MEMO_MODEL, config, init_seed=9)
        for name in a.params:
            assert np.array_equal(a.params[name], b.params[name])

    def test_wrong_window_width_rejected(self):
        rows = build_training_windows(cycle_corpus(), 12)
        with pytest.raises(ConfigError):
            train(rows, MEMO_MODEL, TrainConfig(steps=1))

    def test_eval_curve_at_checkpoint_interval(self):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        config = TrainConfig(steps=10, checkpoint_interval=4, seed=0)
        result = train(rows, MEMO_MODEL, config, eval_windows=rows)
        assert [s for s, _ in result.eval_curve] == [4, 8, 10]
        for _, v in result.eval_curve:
            assert np.isfinite(v)

    def test_checkpoint_written_and_loadable(self, tmp_path):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        path = tmp_path / "run.sbgc"
        config = TrainConfig(steps=12, checkpoint_interval=5, seed=0)
        result = train(rows, MEMO_MODEL, config, checkpoint_path=path)
        params, model_config, extra = load_checkpoint(path)
        assert model_config == MEMO_MODEL
        assert extra["step"] == 12
        assert extra["loss"] == pytest.approx(result.loss_curve[-1])
        for name in result.params:
            assert np.array_equal(params[name], result.params[name])

    def test_training_changes_behavior(self):
        rows, result = self.memo_train(steps=120)
        ids = rows[:1, :-1].astype(int)
        trained_logits = forward(result.params, MEMO_MODEL, ids)
        # trained model concentrates on the true next token
        probs = np.exp(trained_logits - trained_logits.max(axis=-1, keepdims=True))
        probs /= probs.sum(axis=-1, keepdims=True)
        target = rows[0, 1:][rows[0, 1:] != PAD]
        picked = probs[0, np.arange(len(target)), target]
        assert picked.mean() > 0.8


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
class TestAbort:
    def test_divergence_raises_and_keeps_checkpoint(self, tmp_path):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        path = tmp_path / "diverged.sbgc"
        config = TrainConfig(
            steps=10, lr=1e30, warmup_steps=0, checkpoint_interval=1, seed=0
        )
        with pytest.raises(TrainingError):
            train(rows, MEMO_MODEL, config, checkpoint_path=path)
        # the file holds the last finite-loss parameters
        params, model_config, extra = load_checkpoint(path)
        assert model_config == MEMO_MODEL
        assert extra["step"] >= 1
        for tensor in params.values():
            assert np.all(np.isfinite(tensor))

    def test_divergence_without_checkpoint_path(self):
        rows = build_training_windows(cycle_corpus(), MEMO_MODEL.context_length)
        config = TrainConfig(steps=10, lr=1e30, warmup_steps=0, seed=0)
        with pytest.raises(TrainingError):
            train(rows, MEMO_MODEL, config)


class TestEvaluateLoss:
    def test_matches_single_batch_loss(self):
        rows = build_training_windows(cycle_corpus(37), MEMO_MODEL.context_length)
        params = train(rows, MEMO_MODEL, TrainConfig(steps=5, seed=0)).params
        inputs, targets = rows[:, :-1], rows[:, 1:]
        mask = targets != PAD
        whole = loss(params, MEMO_MODEL, inputs, targets, mask)
        assert evaluate_loss(params, MEMO_MODEL, rows, batch_size=100) == pytest.approx(
            whole, rel=1e-9
        )

    def test_batch_size_does_not_matter(self):
        rows = build_training_windows(cycle_corpus(80), MEMO_MODEL.context_length)
        params = train(rows, MEMO_MODEL, TrainConfig(steps=5, seed=0)).params
        a = evaluate_loss(params, MEMO_MODEL, rows, batch_size=2)
        b = evaluate_loss(params, MEMO_MODEL, rows, batch_size=64)
        # float32 forward passes batched differently agree to f32 precision
        assert a == pytest.approx(b, rel=1e-6)

    def test_no_predictable_positions_rejected(self):
        params = train(
            build_training_windows(cycle_corpus(), 8),
            MEMO_MODEL,
            TrainConfig(steps=1, seed=0),
        ).params
        empty = np.full((3, 9), PAD, dtype=np.int32)
        with pytest.raises(ConfigError):
            evaluate_loss(params, MEMO_MODEL, empty)
