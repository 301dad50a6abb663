"""Command-line pipeline: ingest | simulate | serialize | train | predict | eval | report.

Each stage reads the formats the library modules define, writes its
outputs plus exactly one run manifest, and exits 0 on success, 2 on
configuration errors, 3 on data errors, and 4 on anything internal.

Values resolve in order: built-in defaults, then the ``--config`` TOML
document's stage section, then ``--from-manifest`` (replaying a prior
run), then explicit command-line flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import CheckpointError, ConfigError, DataError, SabergenError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_STAGES = ("ingest", "simulate", "serialize", "train", "predict", "eval", "report")


def _load_toml(path: Path) -> dict:
    try:
        import tomllib  # py311+
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"config {path} does not parse: {err}") from None


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults, config document, manifest, and explicit flags."""
    resolved = dict(defaults)
    if args.config:
        doc = _load_toml(Path(args.config))
        section = doc.get(args.stage, {})
        if not isinstance(section, dict):
            raise ConfigError(f"config section [{args.stage}] must be a table")
        unknown = set(section) - set(defaults)
        if unknown:
            raise ConfigError(
                f"config section [{args.stage}] has unknown keys: {', '.join(sorted(unknown))}"
            )
        resolved.update(section)
    if args.from_manifest:
        from .manifest import read_manifest

        stored = read_manifest(args.from_manifest)
        if stored.subcommand != args.stage:
            raise ConfigError(
                f"manifest {args.from_manifest} records a {stored.subcommand!r} run, not {args.stage!r}"
            )
        resolved.update(stored.config)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if resolved.get(k) in (None, "")]
    if missing:
        raise ConfigError(f"missing required settings: {', '.join(missing)}")


def _check_input(path, stage: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"{stage}: input {p} does not exist")
    return p


def _manifest_path(resolved: dict, primary_out) -> Path:
    if resolved.get("manifest"):
        return Path(resolved["manifest"])
    return Path(str(primary_out) + ".manifest.json")


def _start_manifest(stage: str, resolved: dict, seeds: dict | None = None):
    from . import __version__
    from .manifest import RunManifest

    clean = {k: v for k, v in resolved.items() if k != "manifest"}
    return RunManifest(
        subcommand=stage, config=clean, seeds=seeds or {}, tool_version=__version__
    ).start()


def write_games_jsonl(games, path) -> None:
    from .events import game_to_dict

    with open(path, "w", encoding="utf-8") as fh:
        for game in games:
            fh.write(json.dumps(game_to_dict(game), sort_keys=True) + "\n")


def read_games_jsonl(path):
    from .events import game_from_dict

    games = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                games.append(game_from_dict(json.loads(line)))
            except json.JSONDecodeError as err:
                raise DataError(f"{path}:{lineno}: not JSON: {err}") from None
    if not games:
        raise DataError(f"{path} holds no games")
    return games


# --- stage implementations ----------------------------------------------


def _stage_ingest(args) -> int:
    defaults = {"csv": None, "out": None, "manifest": None}
    resolved = _resolve(args, defaults)
    _require(resolved, "csv", "out")
    src = _check_input(resolved["csv"], "ingest")
    from .ingest import ingest_csv

    manifest = _start_manifest("ingest", resolved)
    manifest.add_input(src)
    games, report = ingest_csv(src)
    write_games_jsonl(games, resolved["out"])
    manifest.add_output(resolved["out"])
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, resolved["out"]))
    print(
        f"ingest: {report.rows_read} rows read, {report.rows_used} used, "
        f"{report.games_built} games built"
    )
    for reason, n in sorted(report.rows_dropped.items()):
        print(f"ingest: dropped {n} rows: {reason}")
    for reason, n in sorted(report.games_dropped.items()):
        print(f"ingest: dropped {n} games: {reason}")
    return EXIT_OK


def _stage_simulate(args) -> int:
    defaults = {
        "games": 200,
        "postseason": 0,
        "seed": 7,
        "out": None,
        "manifest": None,
    }
    resolved = _resolve(args, defaults)
    _require(resolved, "out")
    from .simulate import default_config, simulate

    config = default_config(
        num_games=int(resolved["games"]),
        seed=int(resolved["seed"]),
        postseason_games=int(resolved["postseason"]),
    )
    manifest = _start_manifest("simulate", resolved, seeds={"simulate": config.seed})
    corpus = simulate(config)
    write_games_jsonl(corpus, resolved["out"])
    manifest.add_output(resolved["out"])
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, resolved["out"]))
    n_pitch = sum(len(pa.pitches) for g in corpus for pa in g.plate_appearances)
    print(f"simulate: {len(corpus)} games, {n_pitch} pitches -> {resolved['out']}")
    return EXIT_OK


def _stage_serialize(args) -> int:
    defaults = {"games": None, "tokens": None, "vocab": None, "manifest": None}
    resolved = _resolve(args, defaults)
    _require(resolved, "games", "tokens")
    src = _check_input(resolved["games"], "serialize")
    from .codec import Vocabulary, default_qspec, serialize, write_token_file, write_vocab_file

    qspec = default_qspec()
    vocab = Vocabulary(qspec)
    manifest = _start_manifest("serialize", resolved)
    manifest.add_input(src)
    games = read_games_jsonl(src)
    seqs = [serialize(g, vocab, qspec) for g in games]
    write_token_file(seqs, resolved["tokens"])
    manifest.add_output(resolved["tokens"])
    if resolved.get("vocab"):
        write_vocab_file(vocab, resolved["vocab"])
        manifest.add_output(resolved["vocab"])
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, resolved["tokens"]))
    total = sum(len(s) for s in seqs)
    print(f"serialize: {len(seqs)} games, {total} tokens -> {resolved['tokens']}")
    return EXIT_OK


def _stage_train(args) -> int:
    defaults = {
        "tokens": None,
        "out": None,
        "eval_tokens": None,
        "steps": 2000,
        "batch_size": 16,
        "lr": 3e-4,
        "warmup": 100,
        "grad_clip": 1.0,
        "weight_decay": 0.0,
        "checkpoint_interval": 500,
        "dim": 128,
        "layers": 4,
        "heads": 4,
        "context": 256,
        "seed": 0,
        "manifest": None,
    }
    resolved = _resolve(args, defaults)
    _require(resolved, "tokens", "out")
    src = _check_input(resolved["tokens"], "train")
    from .codec import Vocabulary, default_qspec, read_token_file
    from .model import ModelConfig
    from .train import TrainConfig, build_training_windows, evaluate_loss, train

    vocab = Vocabulary(default_qspec())
    seqs = read_token_file(src)
    model_config = ModelConfig(
        vocab_size=vocab.size,
        dim=int(resolved["dim"]),
        layers=int(resolved["layers"]),
        heads=int(resolved["heads"]),
        context_length=int(resolved["context"]),
    )
    train_config = TrainConfig(
        steps=int(resolved["steps"]),
        batch_size=int(resolved["batch_size"]),
        lr=float(resolved["lr"]),
        warmup_steps=int(resolved["warmup"]),
        grad_clip=float(resolved["grad_clip"]),
        weight_decay=float(resolved["weight_decay"]),
        checkpoint_interval=int(resolved["checkpoint_interval"]),
        seed=int(resolved["seed"]),
    )
    windows = build_training_windows(seqs, model_config.context_length)
    eval_windows = None
    if resolved.get("eval_tokens"):
        eval_src = _check_input(resolved["eval_tokens"], "train")
        eval_windows = build_training_windows(
            read_token_file(eval_src), model_config.context_length
        )
    manifest = _start_manifest("train", resolved, seeds={"train": train_config.seed})
    manifest.add_input(src)
    result = train(
        windows,
        model_config,
        train_config,
        checkpoint_path=resolved["out"],
        eval_windows=eval_windows,
    )
    manifest.add_output(resolved["out"])
    curve_path = Path(str(resolved["out"]) + ".curve.tsv")
    with open(curve_path, "w", encoding="utf-8") as fh:
        fh.write("step\tloss\n")
        for step, loss in enumerate(result.loss_curve, 1):
            fh.write(f"{step}\t{loss:.6f}\n")
    manifest.add_output(curve_path)
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, resolved["out"]))
    final = result.loss_curve[-1] if result.loss_curve else float("nan")
    print(f"train: {len(result.loss_curve)} steps, final batch loss {final:.4f}")
    if eval_windows is not None:
        loss = evaluate_loss(result.params, model_config, eval_windows)
        print(f"train: held-out loss {loss:.4f}")
    return EXIT_OK


def _stage_predict(args) -> int:
    defaults = {
        "checkpoint": None,
        "games": None,
        "task": None,
        "out": None,
        "batch_size": 64,
        "manifest": None,
    }
    resolved = _resolve(args, defaults)
    _require(resolved, "checkpoint", "games", "task", "out")
    ckpt = _check_input(resolved["checkpoint"], "predict")
    src = _check_input(resolved["games"], "predict")
    from .codec import Vocabulary, default_qspec
    from .model import load_checkpoint
    from .predict import (
        PredictionTask,
        build_instances,
        predict_batch,
        records_from,
        write_dump,
    )

    try:
        task = PredictionTask(resolved["task"])
    except ValueError:
        valid = ", ".join(t.value for t in PredictionTask)
        raise ConfigError(f"unknown task {resolved['task']!r} (expected one of: {valid})") from None
    manifest = _start_manifest("predict", resolved)
    manifest.add_input(ckpt)
    manifest.add_input(src)
    params, model_config, _extra = load_checkpoint(ckpt)
    vocab = Vocabulary(default_qspec())
    if model_config.vocab_size != vocab.size:
        raise DataError(
            f"checkpoint vocab size {model_config.vocab_size} != codec vocab size {vocab.size}"
        )
    games = read_games_jsonl(src)
    instances = build_instances(games, task, vocab, model_config.context_length)
    if not instances:
        raise DataError("no predictable pitches in the input games")
    predictions = predict_batch(
        params, model_config, instances, task, vocab, batch_size=int(resolved["batch_size"])
    )
    records = records_from(instances, predictions, task)
    write_dump(records, resolved["out"])
    manifest.add_output(resolved["out"])
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, resolved["out"]))
    correct = sum(1 for r in records if r.gold == r.predicted)
    print(
        f"predict: {len(records)} instances, {correct / len(records):.4f} accuracy -> {resolved['out']}"
    )
    return EXIT_OK


def _report_to_dict(report) -> dict:
    doc = {
        "task": report.task,
        "n_instances": report.n_instances,
        "accuracy": report.accuracy,
        "recall": report.recall,
        "macro_f1": report.macro_f1,
        "iz_accuracy": report.iz_accuracy,
        "oz_accuracy": report.oz_accuracy,
        "consistency": [[x, acc] for x, acc in report.consistency],
        "arsenal": {k: [acc, n] for k, (acc, n) in report.arsenal.items()},
        "errors": report.errors,
    }
    if report.confusion is not None:
        doc["confusion_labels"] = list(report.confusion_labels)
        doc["confusion"] = report.confusion.tolist()
    return doc


def _stage_eval(args) -> int:
    defaults = {"dump": None, "task": None, "out": None, "manifest": None}
    resolved = _resolve(args, defaults)
    _require(resolved, "dump", "out")
    src = _check_input(resolved["dump"], "eval")
    from .evaluate import compute_report
    from .predict import read_dump

    manifest = _start_manifest("eval", resolved)
    manifest.add_input(src)
    records = read_dump(src)
    report = compute_report(records)
    if resolved.get("task") and report.task != resolved["task"]:
        raise ConfigError(
            f"dump {src} holds task {report.task!r}, not the requested {resolved['task']!r}"
        )
    # --out names either a metrics JSON file or a directory to hold one
    out = Path(resolved["out"])
    if out.is_dir() or out.suffix != ".json":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "eval.json"
    doc = _report_to_dict(report)
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    manifest.add_output(out)
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, out))
    print(
        f"eval: task {report.task}, {report.n_instances} instances, "
        f"accuracy {report.accuracy:.4f}, macro-F1 {report.macro_f1:.4f}"
    )
    return EXIT_OK


def _stage_report(args) -> int:
    defaults = {"dump": None, "out_dir": None, "manifest": None}
    resolved = _resolve(args, defaults)
    _require(resolved, "dump", "out_dir")
    src = _check_input(resolved["dump"], "report")
    from .evaluate import compute_report
    from .predict import read_dump
    from .report import emit_report

    manifest = _start_manifest("report", resolved)
    manifest.add_input(src)
    records = read_dump(src)
    out_dir = Path(resolved["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = emit_report(compute_report(records), out_dir)
    for path in paths:
        manifest.add_output(path)
    from .manifest import write_manifest

    write_manifest(manifest.finish(), _manifest_path(resolved, out_dir / "report"))
    print(f"report: wrote {len(paths)} files under {out_dir}")
    return EXIT_OK


_HANDLERS = {
    "ingest": _stage_ingest,
    "simulate": _stage_simulate,
    "serialize": _stage_serialize,
    "train": _stage_train,
    "predict": _stage_predict,
    "eval": _stage_eval,
    "report": _stage_report,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML run document; this stage reads its own section")
    parser.add_argument("--from-manifest", dest="from_manifest", help="replay a prior run's resolved settings")
    parser.add_argument("--manifest", help="where to write this run's manifest")
    parser.add_argument("--threads", type=int, help="bound numeric worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sabergen",
        description="Serialize pitch-by-pitch games, train a small autoregressive model, and evaluate constrained predictions.",
    )
    sub = parser.add_subparsers(dest="stage", required=True)

    p = sub.add_parser("ingest", help="pitch-level CSV to validated games.jsonl")
    p.add_argument("--csv", help="input pitch-level CSV")
    p.add_argument("--out", help="output games.jsonl")
    _add_common(p)

    p = sub.add_parser("simulate", help="generate a synthetic corpus with known ground truth")
    p.add_argument("--games", type=int, help="regular-season games to generate")
    p.add_argument("--postseason", type=int, help="postseason games to generate")
    p.add_argument("--seed", type=int, help="corpus seed")
    p.add_argument("--out", help="output games.jsonl")
    _add_common(p)

    p = sub.add_parser("serialize", help="games.jsonl to a token file")
    p.add_argument("--games", help="input games.jsonl")
    p.add_argument("--tokens", help="output token file")
    p.add_argument("--vocab", help="also write the vocabulary listing here")
    _add_common(p)

    p = sub.add_parser("train", help="fit the autoregressive model on a token file")
    p.add_argument("--tokens", help="training token file")
    p.add_argument("--eval-tokens", dest="eval_tokens", help="held-out token file for loss reporting")
    p.add_argument("--out", help="output checkpoint path")
    p.add_argument("--steps", type=int, help="optimizer steps")
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--warmup", type=int, help="linear warmup steps")
    p.add_argument("--grad-clip", dest="grad_clip", type=float)
    p.add_argument("--weight-decay", dest="weight_decay", type=float)
    p.add_argument("--checkpoint-interval", dest="checkpoint_interval", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--heads", type=int)
    p.add_argument("--context", type=int, help="context window length in tokens")
    p.add_argument("--seed", type=int)
    _add_common(p)

    p = sub.add_parser("predict", help="constrained predictions from a checkpoint")
    p.add_argument("--checkpoint")
    p.add_argument("--games", help="games.jsonl to predict over")
    p.add_argument("--task", help="pitch_type_multi | pitch_type_binary | swing_decision")
    p.add_argument("--out", help="output prediction dump (TSV)")
    p.add_argument("--batch-size", dest="batch_size", type=int)
    _add_common(p)

    p = sub.add_parser("eval", help="metrics from a prediction dump")
    p.add_argument("--dump", help="prediction dump (TSV)")
    p.add_argument("--task", help="verify the dump holds this task before evaluating")
    p.add_argument("--out", help="metrics JSON file, or a directory to hold eval.json")
    _add_common(p)

    p = sub.add_parser("report", help="full TSV and plot directory from a prediction dump")
    p.add_argument("--dump", help="prediction dump (TSV)")
    p.add_argument("--out-dir", dest="out_dir", help="report output directory")
    _add_common(p)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        n = str(max(1, args.threads))
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = n
    try:
        return _HANDLERS[args.stage](args)
    except ConfigError as err:
        print(f"sabergen {args.stage}: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CheckpointError) as err:
        print(f"sabergen {args.stage}: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except SabergenError as err:
        print(f"sabergen {args.stage}: error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as err:  # noqa: BLE001
        print(f"sabergen {args.stage}: internal error: {err!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
