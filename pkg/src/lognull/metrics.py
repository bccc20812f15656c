"""Partition similarity measures: NMI, Rand index, Jaccard index.

All three are computed from the contingency table of co-membership counts,
in O(n + k1*k2) rather than by enumerating vertex pairs, and all are total
functions: the degenerate 0/0 cases (identical trivial partitions) are
defined as 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ConfusionCounts:
    """Pair-classification counts of two partitions of the same vertex set.

    n11: pairs together in both partitions; n10/n01: together in exactly the
    first/second; n00: separated in both. The contingency entries count
    vertices per community pair and their row/column sums reproduce the two
    partitions' community sizes.
    """

    n11: int
    n10: int
    n01: int
    n00: int
    sizes_a: np.ndarray
    sizes_b: np.ndarray
    table: dict


def _pairs(counts):
    counts = np.asarray(counts, dtype=np.int64)
    return int((counts * (counts - 1) // 2).sum())


def confusion_counts(a, b):
    """Contingency table and pair counts for two partitions."""
    if a.n != b.n:
        raise ValueError(
            f"partitions cover different vertex sets ({a.n} vs {b.n} vertices)"
        )
    aa = a.normalize().assignment
    bb = b.normalize().assignment
    ka = int(aa.max()) + 1 if aa.size else 0
    kb = int(bb.max()) + 1 if bb.size else 0
    codes, counts = np.unique(aa * kb + bb, return_counts=True)
    table = {
        (int(c // kb), int(c % kb)): int(cnt) for c, cnt in zip(codes, counts)
    }
    sizes_a = np.bincount(aa, minlength=ka)
    sizes_b = np.bincount(bb, minlength=kb)
    n = aa.size
    total = n * (n - 1) // 2
    n11 = _pairs(counts)
    n10 = _pairs(sizes_a) - n11
    n01 = _pairs(sizes_b) - n11
    n00 = total - n11 - n10 - n01
    return ConfusionCounts(n11, n10, n01, n00, sizes_a, sizes_b, table)


def _entropy(sizes, n):
    p = sizes[sizes > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(a, b):
    """Normalized mutual information, 2*I / (H(a) + H(b)), in [0, 1]."""
    cc = confusion_counts(a, b)
    n = a.n
    ha = _entropy(cc.sizes_a, n)
    hb = _entropy(cc.sizes_b, n)
    if ha + hb == 0.0:
        # both partitions are single-community: identical, so similarity 1
        return 1.0
    info = 0.0
    for (i, j), cnt in cc.table.items():
        info += (cnt / n) * np.log(
            cnt * n / (cc.sizes_a[i] * cc.sizes_b[j])
        )
    value = 2.0 * info / (ha + hb)
    return float(min(1.0, max(0.0, value)))


def rand_index(a, b):
    """Fraction of vertex pairs classified consistently by both partitions."""
    cc = confusion_counts(a, b)
    total = cc.n11 + cc.n10 + cc.n01 + cc.n00
    if total == 0:
        return 1.0
    return (cc.n11 + cc.n00) / total


def jaccard_index(a, b):
    """Pairs together in both partitions over pairs together in at least one."""
    cc = confusion_counts(a, b)
    denom = cc.n11 + cc.n10 + cc.n01
    if denom == 0:
        # no co-membership anywhere: two all-singleton partitions agree
        return 1.0
    return cc.n11 / denom
