"""Predict the next pitch type by masking the softmax to legal answers.

Rather than sampling freely, prediction scores only the 12 pitch-type
tokens (or the 2 swing flags) at a known decision point, renormalizes,
and takes the argmax. A few minutes of training on a dozen games lands
between the majority-class floor and the Bayes ceiling, because the
serialized history names every pitch each starter has thrown so far.
"""

from sabergen.codec import Vocabulary, default_qspec, serialize
from sabergen.model import ModelConfig
from sabergen.predict import PredictionTask, build_instances, predict_batch, task_labels
from sabergen.simulate import analytic_oracle, default_config, simulate
from sabergen.train import TrainConfig, build_training_windows, train

qspec = default_qspec()
vocab = Vocabulary(qspec)

config = default_config(num_games=14, seed=37)
games = simulate(config)
train_games, eval_games = games[:12], games[12:]

model_config = ModelConfig(
    vocab_size=vocab.size, dim=64, layers=2, heads=4, context_length=128
)
windows = build_training_windows(
    [serialize(g, vocab, qspec) for g in train_games], model_config.context_length
)
print(f"training on {windows.shape[0]} windows...")
result = train(
    windows, model_config,
    TrainConfig(steps=1500, batch_size=16, lr=1e-3, warmup_steps=50, seed=2),
)

task = PredictionTask.PITCH_TYPE_MULTI
instances = build_instances(eval_games, task, vocab, model_config.context_length)
preds = predict_batch(result.params, model_config, instances, task, vocab)
labels = [label for label, _ in task_labels(task, vocab)]

correct = sum(p.label == inst.gold for inst, p in zip(instances, preds))
oracle = analytic_oracle(config)
print(f"\npitch-type accuracy on {len(instances)} held-out pitches: "
      f"{correct / len(instances):.4f}")
print(f"  majority-class floor {oracle.majority_type_accuracy:.4f}, "
      f"Bayes ceiling {oracle.pooled_bayes_type_accuracy:.4f}")

print("\nfirst five decisions:")
for inst, pred in list(zip(instances, preds))[:5]:
    top = sorted(zip(labels, pred.probs), key=lambda kv: -kv[1])[:3]
    shown = "  ".join(f"{c} {p:.3f}" for c, p in top)
    mark = "+" if pred.label == inst.gold else "-"
    print(f"  [{mark}] gold {inst.gold:<3} pred {pred.label:<3} | {shown}")

# every probability vector is a distribution over the 12 legal answers
assert all(abs(sum(p.probs) - 1.0) < 1e-9 for p in preds)
