"""Report emission: metric tables, deterministic SVG plots, and a
summary that places desk-scale results next to the reference numbers
reported for the full-scale system this package miniaturizes.

Every file is rendered with fixed formatting and ordering, so emitting
the same report twice produces byte-identical output (golden-file
friendly). Plots are self-contained SVG with a fixed canvas; no plotting
library is involved.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .evaluate import EvalReport
from .predict import PredictionTask

__all__ = ["emit_report", "REFERENCE_VALUES"]

# Published results of the full-scale system, kept for context in report
# summaries. Desk-scale runs train a far smaller model on far less data,
# so these are landmarks, not targets.
REFERENCE_VALUES = {
    PredictionTask.PITCH_TYPE_BINARY.value: [
        ("accuracy (full-scale model)", 0.637),
        ("accuracy (full-scale frequency baseline)", 0.633),
        ("recall, fastball class (full-scale model)", 0.792),
        ("recall, fastball class (full-scale frequency baseline)", 0.792),
        ("F1 (full-scale model)", 0.722),
        ("F1 (full-scale frequency baseline)", 0.720),
    ],
    PredictionTask.PITCH_TYPE_MULTI.value: [
        ("share of plate appearances with >=1 correct prediction (full-scale)", 0.838),
        ("share of plate appearances with >=2 correct predictions (full-scale)", 0.547),
        ("accuracy, 2-3 pitch arsenals (full-scale)", 0.668),
        ("next-pitch accuracy, stated in one place as (full-scale)", 0.84),
        ("next-pitch accuracy, stated elsewhere as (full-scale)", 0.64),
    ],
    PredictionTask.SWING_DECISION.value: [
        ("in-zone accuracy (full-scale model)", 0.766),
        ("in-zone accuracy (full-scale physics baseline)", 0.325),
        ("out-of-zone accuracy (full-scale model)", 0.792),
        ("out-of-zone accuracy (full-scale physics baseline)", 0.704),
    ],
}

_SUMMARY_NOTES = {
    PredictionTask.PITCH_TYPE_BINARY.value: [
        "binary recall is reported for the fastball (positive) class; the full-scale write-up does not name its positive class",
    ],
    PredictionTask.PITCH_TYPE_MULTI.value: [
        "the full-scale write-up states next-pitch accuracy as ~84% in one place and ~64% in another; both are surfaced, unresolved",
    ],
    PredictionTask.SWING_DECISION.value: [],
}

# --- svg primitives ------------------------------------------------------

_W, _H = 640, 400
_X0, _Y0, _X1, _Y1 = 70, 50, 610, 350  # plot rectangle


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _svg_open(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W / 2:.2f}" y="28" text-anchor="middle" font-size="16" fill="#111111">{_esc(title)}</text>',
    ]


def _axis_labels(xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<text x="{(_X0 + _X1) / 2:.2f}" y="{_H - 10}" text-anchor="middle" font-size="12" fill="#333333">{_esc(xlabel)}</text>',
        f'<text x="18" y="{(_Y0 + _Y1) / 2:.2f}" text-anchor="middle" font-size="12" fill="#333333" '
        f'transform="rotate(-90 18 {(_Y0 + _Y1) / 2:.2f})">{_esc(ylabel)}</text>',
    ]


def _y_grid(ymax: float, fmt: str) -> list[str]:
    parts = []
    for i in range(6):
        frac = i / 5
        y = _Y1 - frac * (_Y1 - _Y0)
        parts.append(
            f'<line x1="{_X0}" y1="{y:.2f}" x2="{_X1}" y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_X0 - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11" fill="#333333">{fmt % (frac * ymax)}</text>'
        )
    return parts


def _frame() -> str:
    return (
        f'<rect x="{_X0}" y="{_Y0}" width="{_X1 - _X0}" height="{_Y1 - _Y0}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>'
    )


def _line_chart(points: Sequence[tuple[int, float]], title: str, xlabel: str, ylabel: str) -> str:
    parts = _svg_open(title)
    parts += _y_grid(1.0, "%.2f")
    n = len(points)
    step = (_X1 - _X0) / max(n - 1, 1)
    coords = []
    for i, (_, y) in enumerate(points):
        px = _X0 + i * step if n > 1 else (_X0 + _X1) / 2
        py = _Y1 - y * (_Y1 - _Y0)
        coords.append((px, py))
    poly = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
    parts.append(f'<polyline points="{poly}" fill="none" stroke="#1d5fa8" stroke-width="2"/>')
    tick_every = max(1, (n + 9) // 10)
    for i, ((xv, _), (px, py)) in enumerate(zip(points, coords)):
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="#1d5fa8"/>')
        if i % tick_every == 0 or i == n - 1:
            parts.append(
                f'<text x="{px:.2f}" y="{_Y1 + 16}" text-anchor="middle" font-size="11" fill="#333333">{xv}</text>'
            )
    parts.append(_frame())
    parts += _axis_labels(xlabel, ylabel)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _bar_chart(
    bars: Sequence[tuple[str, float, Optional[str]]],
    title: str,
    xlabel: str,
    ylabel: str,
    ymax: Optional[float] = None,
    fmt: str = "%.2f",
) -> str:
    parts = _svg_open(title)
    if ymax is None:
        ymax = max((v for _, v, _ in bars), default=1.0) or 1.0
    parts += _y_grid(ymax, fmt)
    n = len(bars)
    slot = (_X1 - _X0) / max(n, 1)
    width = slot * 0.6
    for i, (label, value, annotation) in enumerate(bars):
        cx = _X0 + (i + 0.5) * slot
        h = (value / ymax) * (_Y1 - _Y0)
        parts.append(
            f'<rect x="{cx - width / 2:.2f}" y="{_Y1 - h:.2f}" width="{width:.2f}" '
            f'height="{h:.2f}" fill="#3b87c8"/>'
        )
        parts.append(
            f'<text x="{cx:.2f}" y="{_Y1 - h - 5:.2f}" text-anchor="middle" font-size="11" fill="#111111">{fmt % value}</text>'
        )
        parts.append(
            f'<text x="{cx:.2f}" y="{_Y1 + 16}" text-anchor="middle" font-size="11" fill="#333333">{_esc(label)}</text>'
        )
        if annotation:
            parts.append(
                f'<text x="{cx:.2f}" y="{_Y1 + 30}" text-anchor="middle" font-size="10" fill="#777777">{_esc(annotation)}</text>'
            )
    parts.append(_frame())
    parts += _axis_labels(xlabel, ylabel)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heatmap(matrix: np.ndarray, labels: Sequence[str], title: str) -> str:
    parts = _svg_open(title)
    n = len(labels)
    cw = (_X1 - _X0) / n
    ch = (_Y1 - _Y0) / n
    peak = int(matrix.max()) or 1
    for i in range(n):
        for j in range(n):
            value = int(matrix[i, j])
            t = value / peak
            r = round(255 - t * (255 - 21))
            g = round(255 - t * (255 - 84))
            b = round(255 - t * (255 - 148))
            x = _X0 + j * cw
            y = _Y0 + i * ch
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                f'fill="rgb({r},{g},{b})" stroke="#cccccc" stroke-width="0.5"/>'
            )
            if value:
                color = "#ffffff" if t > 0.55 else "#111111"
                parts.append(
                    f'<text x="{x + cw / 2:.2f}" y="{y + ch / 2 + 3:.2f}" text-anchor="middle" '
                    f'font-size="9" fill="{color}">{value}</text>'
                )
    for i, label in enumerate(labels):
        parts.append(
            f'<text x="{_X0 - 6}" y="{_Y0 + (i + 0.5) * ch + 3:.2f}" text-anchor="end" font-size="10" fill="#333333">{_esc(label)}</text>'
        )
        parts.append(
            f'<text x="{_X0 + (i + 0.5) * cw:.2f}" y="{_Y1 + 14}" text-anchor="middle" font-size="10" fill="#333333">{_esc(label)}</text>'
        )
    parts.append(_frame())
    parts += _axis_labels("predicted", "gold")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- tsv + summary -------------------------------------------------------


def _write(path: Path, text: str, written: list[Path]) -> None:
    path.write_text(text, encoding="utf-8")
    written.append(path)


def emit_report(report: EvalReport, out_dir: Union[str, Path]) -> list[Path]:
    """Write one file per metric family plus plots and a summary.

    Returns the paths written. Re-emitting the same report is
    byte-identical; sections a task does not define are omitted.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    lines = [
        "metric\tvalue",
        f"n_instances\t{report.n_instances}",
        f"accuracy\t{report.accuracy:.6f}",
        f"macro_f1\t{report.macro_f1:.6f}",
    ]
    for cls, value in sorted(report.recall.items()):
        lines.append(f"recall.{cls}\t{value:.6f}")
    if report.iz_accuracy is not None:
        lines.append(f"iz_accuracy\t{report.iz_accuracy:.6f}")
    elif report.task == PredictionTask.SWING_DECISION.value:
        lines.append("iz_accuracy\tabsent")
    if report.oz_accuracy is not None:
        lines.append(f"oz_accuracy\t{report.oz_accuracy:.6f}")
    elif report.task == PredictionTask.SWING_DECISION.value:
        lines.append("oz_accuracy\tabsent")
    _write(out / f"metrics.{report.task}.tsv", "\n".join(lines) + "\n", written)

    if report.consistency:
        rows = ["x\tfraction"] + [f"{x}\t{frac:.6f}" for x, frac in report.consistency]
        _write(out / "consistency.tsv", "\n".join(rows) + "\n", written)
        _write(
            out / "consistency.svg",
            _line_chart(
                report.consistency,
                "Plate appearances with at least X correct pitch-type predictions",
                "X (correct predictions)",
                "fraction of plate appearances",
            ),
            written,
        )

    if report.arsenal:
        rows = ["bin\taccuracy\tcount"] + [
            f"{name}\t{acc:.6f}\t{count}" for name, (acc, count) in report.arsenal.items()
        ]
        _write(out / "arsenal.tsv", "\n".join(rows) + "\n", written)
        bars = [
            (name, acc, f"n={count}") for name, (acc, count) in report.arsenal.items()
        ]
        _write(
            out / "arsenal.svg",
            _bar_chart(
                bars,
                "Pitch-type accuracy by arsenal size",
                "distinct pitch types in arsenal",
                "accuracy",
                ymax=1.0,
            ),
            written,
        )

    if report.confusion is not None:
        header = "gold\\predicted\t" + "\t".join(report.confusion_labels)
        rows = [header]
        for i, label in enumerate(report.confusion_labels):
            rows.append(label + "\t" + "\t".join(str(int(v)) for v in report.confusion[i]))
        _write(out / "confusion.tsv", "\n".join(rows) + "\n", written)
        _write(
            out / "confusion.svg",
            _heatmap(report.confusion, report.confusion_labels, "Pitch-type confusion matrix"),
            written,
        )

    if report.errors:
        rows = ["class\terrors"] + [f"{c}\t{n}" for c, n in sorted(report.errors.items())]
        _write(out / "errors.tsv", "\n".join(rows) + "\n", written)
        bars = [(c, float(n), None) for c, n in sorted(report.errors.items())]
        _write(
            out / "errors.svg",
            _bar_chart(
                bars,
                "Misclassified pitches by gold type",
                "gold pitch type",
                "errors",
                fmt="%d",
            ),
            written,
        )

    summary = [
        "metric\tdesk_value\treference_value\tcomparable",
        f"accuracy\t{report.accuracy:.6f}\t\tdesk-scale result",
        f"macro_f1\t{report.macro_f1:.6f}\t\tdesk-scale result",
    ]
    if report.iz_accuracy is not None:
        summary.append(f"iz_accuracy\t{report.iz_accuracy:.6f}\t\tdesk-scale result")
    if report.oz_accuracy is not None:
        summary.append(f"oz_accuracy\t{report.oz_accuracy:.6f}\t\tdesk-scale result")
    for name, value in REFERENCE_VALUES.get(report.task, []):
        summary.append(f"{name}\t\t{value:.3f}\tnot comparable at desk scale")
    for note in _SUMMARY_NOTES.get(report.task, []):
        summary.append(f"# {note}")
    _write(out / f"summary.{report.task}.tsv", "\n".join(summary) + "\n", written)
    return written
