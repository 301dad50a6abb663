"""Metric suite and report emission over a prediction dump.

Builds a small dump by hand so every number is checkable in your head,
then renders the full report directory: TSV tables plus deterministic
SVG plots, byte-identical on re-emission.
"""

import tempfile
from pathlib import Path

from sabergen.evaluate import compute_report
from sabergen.predict import DumpRecord
from sabergen.report import emit_report


def rec(pa, n, gold, predicted, pitcher="P900"):
    return DumpRecord(
        task="pitch_type_multi", game_id="G1", pa_id=pa, pitch_number=n,
        pitcher_id=pitcher, arsenal_size=2, in_zone=True,
        gold=gold, predicted=predicted, probs=(1.0,),
    )


records = [
    rec("1", 1, "FF", "FF"), rec("1", 2, "FF", "FF"), rec("1", 3, "SL", "FF"),
    rec("2", 1, "FF", "FF"), rec("2", 2, "SL", "SL"),
    rec("3", 1, "FF", "SL"), rec("3", 2, "FF", "FF"),
    rec("3", 3, "FF", "FF"), rec("3", 4, "SL", "FF"),
]

report = compute_report(records)
print(f"task {report.task}, {report.n_instances} instances")
print(f"accuracy  {report.accuracy:.4f}")
print(f"macro F1  {report.macro_f1:.4f}")
for cls, r in report.recall.items():
    print(f"recall {cls}  {r:.4f}")

print("\nconsistency curve (plate appearances with >= X correct):")
for x, frac in report.consistency:
    print(f"  X={x}  {frac:.4f}")

print("\nconfusion (gold rows x predicted columns, nonzero cells):")
for i, g in enumerate(report.confusion_labels):
    for j, p in enumerate(report.confusion_labels):
        if report.confusion[i, j]:
            print(f"  {g} -> {p}: {int(report.confusion[i, j])}")

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "report"
    paths = emit_report(report, out)
    print(f"\nemitted {len(paths)} files:")
    for p in paths:
        print(f"  {p.name}  ({p.stat().st_size} bytes)")

    again = emit_report(report, Path(tmp) / "report2")
    identical = all(
        a.read_bytes() == b.read_bytes() for a, b in zip(paths, again)
    )
    print(f"re-emission byte-identical: {identical}")
