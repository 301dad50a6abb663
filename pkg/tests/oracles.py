"""Brute-force metric reimplementations used only as test oracles.

Everything here is written the slowest, most literal way possible and
shares no code with the package. Disagreement with the package is a
package bug by definition.
"""

from __future__ import annotations

from fractions import Fraction


def oracle_accuracy(golds, preds):
    assert len(golds) == len(preds) and golds
    return sum(1 for g, p in zip(golds, preds) if g == p) / len(golds)


def oracle_recall(golds, preds):
    out = {}
    for cls in sorted(set(golds)):
        hits = sum(1 for g, p in zip(golds, preds) if g == cls and p == cls)
        total = sum(1 for g in golds if g == cls)
        out[cls] = hits / total
    return out


def oracle_macro_f1(golds, preds):
    classes = sorted(set(golds))
    f1s = []
    for cls in classes:
        tp = sum(1 for g, p in zip(golds, preds) if g == cls and p == cls)
        fp = sum(1 for g, p in zip(golds, preds) if g != cls and p == cls)
        fn = sum(1 for g, p in zip(golds, preds) if g == cls and p != cls)
        if 2 * tp + fp + fn == 0:
            f1s.append(0.0)
        else:
            f1s.append(2 * tp / (2 * tp + fp + fn))
    return sum(f1s) / len(f1s)


def oracle_zone_accuracy(golds, preds, zones):
    iz = [(g, p) for g, p, z in zip(golds, preds, zones) if z]
    oz = [(g, p) for g, p, z in zip(golds, preds, zones) if not z]
    iz_acc = sum(1 for g, p in iz if g == p) / len(iz) if iz else None
    oz_acc = sum(1 for g, p in oz if g == p) / len(oz) if oz else None
    return iz_acc, oz_acc


def oracle_consistency(pa_keys, golds, preds):
    """[(X, fraction of PAs with >= X correct)] for X = 1..max PA size."""
    pas = {}
    for key, g, p in zip(pa_keys, golds, preds):
        pas.setdefault(key, []).append(g == p)
    sizes = [len(v) for v in pas.values()]
    counts = [sum(v) for v in pas.values()]
    out = []
    for x in range(1, max(sizes) + 1):
        out.append((x, sum(1 for c in counts if c >= x) / len(pas)))
    return out


def oracle_confusion(golds, preds, labels):
    index = {lab: i for i, lab in enumerate(labels)}
    matrix = [[0] * len(labels) for _ in labels]
    for g, p in zip(golds, preds):
        matrix[index[g]][index[p]] += 1
    return matrix


def oracle_error_counts(golds, preds):
    out = {}
    for cls in sorted(set(golds)):
        out[cls] = sum(1 for g, p in zip(golds, preds) if g == cls and p != cls)
    return out


def oracle_arsenal_sizes(pitcher_ids, golds, min_count=5):
    counts = {}
    for pid, g in zip(pitcher_ids, golds):
        counts.setdefault(pid, {}).setdefault(g, 0)
        counts[pid][g] += 1
    return {
        pid: sum(1 for n in per.values() if n >= min_count)
        for pid, per in counts.items()
    }


def oracle_arsenal_breakdown(pitcher_ids, golds, preds, sizes):
    def bin_of(n):
        if n == 1:
            return "1"
        if 2 <= n <= 3:
            return "2-3"
        if 4 <= n <= 5:
            return "4-5"
        if n >= 6:
            return "6+"
        return None

    rows = {}
    for pid, g, p in zip(pitcher_ids, golds, preds):
        b = bin_of(sizes.get(pid, 0))
        if b is None:
            continue
        hits, total = rows.get(b, (0, 0))
        rows[b] = (hits + (g == p), total + 1)
    return {b: (hits / total, total) for b, (hits, total) in rows.items()}


def oracle_mean_ce(logit_rows, target_idx):
    """Mean -log softmax(logits)[target] via Fractions-free but naive math."""
    import math

    total = 0.0
    for logits, t in zip(logit_rows, target_idx):
        m = max(logits)
        z = sum(math.exp(v - m) for v in logits)
        total += -(logits[t] - m - math.log(z))
    return total / len(logit_rows)


def exact_fraction_accuracy(golds, preds):
    """Accuracy as an exact rational, for tie-free comparisons."""
    return Fraction(sum(1 for g, p in zip(golds, preds) if g == p), len(golds))
