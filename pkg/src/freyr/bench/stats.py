"""Paired statistics for benchmark results.

The headline test is a two-sided Wilcoxon signed-rank test, exact for small
samples: zero differences are dropped, tied magnitudes share mid-ranks, and
for n <= 20 the p-value comes from the full null distribution of the
positive-rank sum (every one of the 2^n sign assignments, computed by
dynamic programming over doubled ranks so ties stay integral). Larger
samples use the normal approximation with tie correction and a continuity
correction of 1/2.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as sps


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean of the ranks they span."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1  # mean of ranks i+1 .. j+1
        i = j + 1
    return ranks


def _exact_p(ranks: np.ndarray, w_plus: float) -> float:
    # Distribution of the positive-rank sum over all sign assignments.
    # Doubling the (possibly half-integral) mid-ranks keeps the support
    # integral, so a subset-sum table enumerates all 2^n outcomes at once.
    doubled = np.rint(2 * ranks).astype(int)
    total = int(doubled.sum())
    table = np.zeros(total + 1, dtype=float)
    table[0] = 1.0
    for r in doubled:
        # r >= 2 always (smallest mid-rank is 1); plain assignment avoids
        # reading values this same pass already wrote.
        table[r:] = table[r:] + table[:-r]
    w2 = int(round(2 * w_plus))
    lo, hi = min(w2, total - w2), max(w2, total - w2)
    p = (table[:lo + 1].sum() + table[hi:].sum()) / 2 ** len(ranks)
    return min(1.0, float(p))


def wilcoxon_signed_rank(x, y) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired samples.

    Parameters
    ----------
    x, y : sequences of equal, nonzero length.

    Returns
    -------
    float in [0, 1]. All-zero differences give 1.0 by convention (the
    samples are indistinguishable).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) == 0:
        raise ValueError("x and y must be equal-length, non-empty 1-d samples")
    diffs = x - y
    diffs = diffs[diffs != 0]
    n = len(diffs)
    if n == 0:
        return 1.0
    ranks = _midranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    if n <= 20:
        return _exact_p(ranks, w_plus)
    mean = n * (n + 1) / 4
    # Tie correction: sum(t^3 - t)/48 over groups of tied magnitudes.
    _, counts = np.unique(np.abs(diffs), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - float(((counts ** 3) - counts).sum()) / 48
    if var <= 0:
        return 1.0
    z = (abs(w_plus - mean) - 0.5) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2)))


def bonferroni(p_values) -> list[float]:
    """Multiply each p-value by the family size, capped at 1."""
    m = len(p_values)
    return [min(1.0, float(p) * m) for p in p_values]


def mean_interval(values, confidence: float = 0.95) -> tuple[float, float | None]:
    """Sample mean and half-width of the t-based confidence interval.

    The half-width is ``None`` for a single observation (no spread to
    estimate). This is the frequentist interval; it is what the reports
    label as their 95% uncertainty.
    """
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    mean = float(arr.mean())
    if arr.size == 1:
        return mean, None
    sem = float(arr.std(ddof=1)) / math.sqrt(arr.size)
    t = float(sps.t.ppf((1 + confidence) / 2, arr.size - 1))
    return mean, t * sem
