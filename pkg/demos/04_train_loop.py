"""Train a small model from scratch on a handful of games.

Serializes three simulated games, chunks them into fixed windows, and
runs a few hundred optimizer steps. Loss starts near ln(vocab) and
falls fast once the model picks up the rigid field grammar.
"""

import math
import tempfile
from pathlib import Path

from sabergen.codec import Vocabulary, default_qspec, serialize
from sabergen.model import ModelConfig, load_checkpoint
from sabergen.simulate import default_config, simulate
from sabergen.train import TrainConfig, build_training_windows, evaluate_loss, train

qspec = default_qspec()
vocab = Vocabulary(qspec)

games = simulate(default_config(num_games=3, seed=29))
seqs = [serialize(g, vocab, qspec) for g in games]
total = sum(len(s) for s in seqs)
print(f"{len(games)} games -> {total} tokens")

model_config = ModelConfig(
    vocab_size=vocab.size, dim=48, layers=2, heads=4, context_length=64
)
windows = build_training_windows(seqs, model_config.context_length)
print(f"{windows.shape[0]} training windows of {windows.shape[1]} tokens")
print(f"uniform-guess loss would be ln({vocab.size}) = {math.log(vocab.size):.3f}")

train_config = TrainConfig(
    steps=300, batch_size=16, lr=1e-3, warmup_steps=30, seed=1,
    checkpoint_interval=100,
)

with tempfile.TemporaryDirectory() as tmp:
    ckpt = Path(tmp) / "demo.sbgc"
    result = train(windows, model_config, train_config, checkpoint_path=ckpt)
    for step in (1, 10, 50, 100, 200, 300):
        print(f"  step {step:>3}  batch loss {result.loss_curve[step - 1]:.4f}")

    final = evaluate_loss(result.params, model_config, windows)
    print(f"\nfull-corpus loss after training: {final:.4f}")

    params, config, extra = load_checkpoint(ckpt)
    print(f"checkpoint holds step {extra['step']}, dim {config.dim}")
    print(f"checkpoint loss matches: {evaluate_loss(params, config, windows):.4f}")
