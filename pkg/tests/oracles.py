"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def gap_block(di: int, dj: int, go: float, ge: float) -> float:
    """Best cost of the gap columns between two consecutive aligned columns.

    ``di`` tokens of a and ``dj`` tokens of b are skipped. Runs of the two gap
    kinds alternate, so their run counts differ by at most one, and any split
    of k gap columns into r runs costs ``r*go + (k-r)*ge``.
    """
    if di == 0 and dj == 0:
        return 0.0
    if dj == 0:
        return go + (di - 1) * ge
    if di == 0:
        return go + (dj - 1) * ge
    best = -math.inf
    for r in range(1, di + 1):
        for s in range(max(1, r - 1), min(dj, r + 1) + 1):
            best = max(best, (r + s) * go + (di - r + dj - s) * ge)
    return best


def brute_force_local_score(a, b, match, mismatch, go, ge, prune=True) -> float:
    """Maximum over every chain of aligned token pairs (every local alignment).

    Exhaustive depth-first enumeration. With ``prune`` a branch is cut only
    when even an all-match continuation could not beat the incumbent, which
    keeps the result exact.
    """
    a = [t.lower() for t in a]
    b = [t.lower() for t in b]
    n, m = len(a), len(b)
    best = 0.0

    def s(i, j):
        return match if a[i] == b[j] else mismatch

    def bound(i, j):
        return match * min(n - 1 - i, m - 1 - j)

    def extend(i, j, score):
        nonlocal best
        if score > best:
            best = score
        for i2 in range(i + 1, n):
            for j2 in range(j + 1, m):
                sc = score + gap_block(i2 - i - 1, j2 - j - 1, go, ge) + s(i2, j2)
                if prune and sc + bound(i2, j2) <= best:
                    continue
                extend(i2, j2, sc)

    for i in range(n):
        for j in range(m):
            sc = s(i, j)
            if prune and sc + bound(i, j) <= best:
                continue
            extend(i, j, sc)
    return best


def column_enumeration_local_score(a, b, match, mismatch, go, ge) -> float:
    """Literal enumeration of all local alignments as column strings (tiny inputs only)."""
    a = [t.lower() for t in a]
    b = [t.lower() for t in b]
    n, m = len(a), len(b)
    best = 0.0

    def walk(i, j, score, prev):
        # (i, j): next unconsumed positions; prev: kind of the previous column
        nonlocal best
        if prev == "M" and score > best:
            best = score
        if i < n and j < m:
            walk(i + 1, j + 1, score + (match if a[i] == b[j] else mismatch), "M")
        if j < m:
            walk(i, j + 1, score + (ge if prev == "X" else go), "X")
        if i < n:
            walk(i + 1, j, score + (ge if prev == "Y" else go), "Y")

    for i in range(n):
        for j in range(m):
            walk(i + 1, j + 1, match if a[i] == b[j] else mismatch, "M")
    return best


def brute_ngrams(docs, n):
    counts = {}
    for toks in docs:
        for i in range(len(toks) - n + 1):
            g = " ".join(t.lower() for t in toks[i : i + n])
            counts[g] = counts.get(g, 0) + 1
    return counts


def kappa_by_hand(a, b, k, weighting="linear") -> Fraction:
    """Weighted kappa with exact rational arithmetic straight from the definition."""
    n = len(a)
    obs = [[Fraction(0)] * k for _ in range(k)]
    for x, y in zip(a, b):
        obs[x][y] += 1
    row = [sum(obs[i]) for i in range(k)]
    col = [sum(obs[i][j] for i in range(k)) for j in range(k)]

    def w(i, j):
        d = Fraction(abs(i - j), k - 1)
        return d if weighting == "linear" else d * d

    num = sum(w(i, j) * obs[i][j] for i in range(k) for j in range(k))
    den = sum(w(i, j) * row[i] * col[j] / n for i in range(k) for j in range(k))
    return 1 - num / den


def central_difference(loss, W, h=1e-6):
    """Numerical gradient of ``loss(W)`` by symmetric differences, entry by entry."""
    g = np.zeros_like(W, dtype=float)
    for idx in np.ndindex(W.shape):
        up, down = W.copy(), W.copy()
        up[idx] += h
        down[idx] -= h
        g[idx] = (loss(up) - loss(down)) / (2 * h)
    return g
