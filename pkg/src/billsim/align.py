"""Word-level Smith-Waterman local alignment with affine (Gotoh) gaps.

Three-state recurrence over aligned columns (M), gaps that consume a token
of ``b`` only (X) and gaps that consume a token of ``a`` only (Y)::

    M[i,j] = s(a_i, b_j) + max(0, M[i-1,j-1], X[i-1,j-1], Y[i-1,j-1])
    X[i,j] = max(M[i,j-1] + open, Y[i,j-1] + open, X[i,j-1] + extend)
    Y[i,j] = max(M[i-1,j] + open, X[i-1,j] + open, Y[i-1,j] + extend)

so a maximal run of k gap columns of one kind costs ``open + (k-1)*extend``.
The local score is ``max(0, max M)``. Ties are broken identically in the
score-only and traceback kernels: restart beats extension, then M, then the
other gap state, then the same gap state; the end cell is the first maximum
in row-major order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Sequence

import numba
import numpy as np

FEATURE_NAMES = ("score_norm_min", "score_norm_max", "aligned_frac", "log_length_ratio")


@dataclass(frozen=True)
class AlignmentParams:
    match: float = 2.0
    mismatch: float = -1.0
    gap_open: float = -2.0
    gap_extend: float = -0.5

    def __post_init__(self):
        if not self.match > 0:
            raise ValueError("match score must be > 0")
        if self.mismatch > 0:
            raise ValueError("mismatch score must be <= 0")
        if self.gap_open > 0 or self.gap_extend > 0:
            raise ValueError("gap penalties must be <= 0")

    def to_dict(self) -> dict:
        return {"match": self.match, "mismatch": self.mismatch, "gap_open": self.gap_open, "gap_extend": self.gap_extend}


@dataclass(frozen=True)
class AlignmentResult:
    raw_score: float
    span_a: tuple[int, int]
    span_b: tuple[int, int]
    aligned_len: int
    # (i, j) per alignment column; -1 marks a gap on that side. Filled by traceback only.
    columns: tuple[tuple[int, int], ...] | None = None


class Vocabulary:
    """Case-insensitive token -> int code mapping shared by a batch of alignments."""

    def __init__(self):
        self._codes: dict[str, int] = {}

    def __len__(self):
        return len(self._codes)

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        codes = self._codes
        out = np.empty(len(tokens), dtype=np.int64)
        for k, t in enumerate(tokens):
            key = t.lower()
            c = codes.get(key)
            if c is None:
                c = codes[key] = len(codes)
            out[k] = c
        return out


_NEG = -np.inf


@numba.njit(cache=True, nogil=True)
def _sw_score(a, b, match, mismatch, go, ge):
    # inner loop runs over b; callers put the shorter sequence in b
    n = a.shape[0]
    m = b.shape[0]
    m_prev = np.full(m + 1, -np.inf)
    x_prev = np.full(m + 1, -np.inf)
    y_prev = np.full(m + 1, -np.inf)
    lm_prev = np.zeros(m + 1, np.int64)
    lx_prev = np.zeros(m + 1, np.int64)
    ly_prev = np.zeros(m + 1, np.int64)
    m_cur = np.full(m + 1, -np.inf)
    x_cur = np.full(m + 1, -np.inf)
    y_cur = np.full(m + 1, -np.inf)
    lm_cur = np.zeros(m + 1, np.int64)
    lx_cur = np.zeros(m + 1, np.int64)
    ly_cur = np.zeros(m + 1, np.int64)
    best = 0.0
    best_len = 0
    best_i = 0
    best_j = 0
    for i in range(1, n + 1):
        ai = a[i - 1]
        m_cur[0] = -np.inf
        x_cur[0] = -np.inf
        y_cur[0] = -np.inf
        for j in range(1, m + 1):
            s = match if ai == b[j - 1] else mismatch
            # M
            v = 0.0
            lv = 0
            if m_prev[j - 1] > v:
                v = m_prev[j - 1]
                lv = lm_prev[j - 1]
            if x_prev[j - 1] > v:
                v = x_prev[j - 1]
                lv = lx_prev[j - 1]
            if y_prev[j - 1] > v:
                v = y_prev[j - 1]
                lv = ly_prev[j - 1]
            mv = v + s
            m_cur[j] = mv
            lm_cur[j] = lv + 1
            # X: gap consuming b_j
            xv = m_cur[j - 1] + go
            lx = lm_cur[j - 1]
            t = y_cur[j - 1] + go
            if t > xv:
                xv = t
                lx = ly_cur[j - 1]
            t = x_cur[j - 1] + ge
            if t > xv:
                xv = t
                lx = lx_cur[j - 1]
            x_cur[j] = xv
            lx_cur[j] = lx
            # Y: gap consuming a_i
            yv = m_prev[j] + go
            ly = lm_prev[j]
            t = x_prev[j] + go
            if t > yv:
                yv = t
                ly = lx_prev[j]
            t = y_prev[j] + ge
            if t > yv:
                yv = t
                ly = ly_prev[j]
            y_cur[j] = yv
            ly_cur[j] = ly
            if mv > best:
                best = mv
                best_len = lv + 1
                best_i = i
                best_j = j
        m_prev, m_cur = m_cur, m_prev
        x_prev, x_cur = x_cur, x_prev
        y_prev, y_cur = y_cur, y_prev
        lm_prev, lm_cur = lm_cur, lm_prev
        lx_prev, lx_cur = lx_cur, lx_prev
        ly_prev, ly_cur = ly_cur, ly_prev
    return best, best_len, best_i, best_j


@numba.njit(cache=True)
def _sw_full(a, b, match, mismatch, go, ge):
    n = a.shape[0]
    m = b.shape[0]
    M = np.full((n + 1, m + 1), -np.inf)
    X = np.full((n + 1, m + 1), -np.inf)
    Y = np.full((n + 1, m + 1), -np.inf)
    # predecessor state: 0 start, 1 M, 2 X, 3 Y
    PM = np.zeros((n + 1, m + 1), np.int8)
    PX = np.zeros((n + 1, m + 1), np.int8)
    PY = np.zeros((n + 1, m + 1), np.int8)
    best = 0.0
    best_i = 0
    best_j = 0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            s = match if a[i - 1] == b[j - 1] else mismatch
            v = 0.0
            p = 0
            if M[i - 1, j - 1] > v:
                v = M[i - 1, j - 1]
                p = 1
            if X[i - 1, j - 1] > v:
                v = X[i - 1, j - 1]
                p = 2
            if Y[i - 1, j - 1] > v:
                v = Y[i - 1, j - 1]
                p = 3
            M[i, j] = v + s
            PM[i, j] = p
            xv = M[i, j - 1] + go
            p = 1
            if Y[i, j - 1] + go > xv:
                xv = Y[i, j - 1] + go
                p = 3
            if X[i, j - 1] + ge > xv:
                xv = X[i, j - 1] + ge
                p = 2
            X[i, j] = xv
            PX[i, j] = p
            yv = M[i - 1, j] + go
            p = 1
            if X[i - 1, j] + go > yv:
                yv = X[i - 1, j] + go
                p = 2
            if Y[i - 1, j] + ge > yv:
                yv = Y[i - 1, j] + ge
                p = 3
            Y[i, j] = yv
            PY[i, j] = p
            if M[i, j] > best:
                best = M[i, j]
                best_i = i
                best_j = j
    # traceback: columns collected in reverse
    cols_i = np.empty(n + m, np.int64)
    cols_j = np.empty(n + m, np.int64)
    k = 0
    i = best_i
    j = best_j
    state = 1 if best > 0.0 else 0
    while state != 0:
        if state == 1:
            cols_i[k] = i - 1
            cols_j[k] = j - 1
            state = PM[i, j]
            i -= 1
            j -= 1
        elif state == 2:
            cols_i[k] = -1
            cols_j[k] = j - 1
            state = PX[i, j]
            j -= 1
        else:
            cols_i[k] = i - 1
            cols_j[k] = -1
            state = PY[i, j]
            i -= 1
        k += 1
    return best, cols_i[:k][::-1].copy(), cols_j[:k][::-1].copy()


def _encode_pair(tokens_a, tokens_b, vocab: Vocabulary | None = None):
    vocab = vocab or Vocabulary()
    return vocab.encode(tokens_a), vocab.encode(tokens_b)


def score_codes(a: np.ndarray, b: np.ndarray, params: AlignmentParams) -> tuple[float, int]:
    """Score-only alignment of integer-coded sequences: (raw_score, aligned_len)."""
    if a.shape[0] == 0 or b.shape[0] == 0:
        return 0.0, 0
    if b.shape[0] > a.shape[0]:
        a, b = b, a
    score, length, _, _ = _sw_score(a, b, params.match, params.mismatch, params.gap_open, params.gap_extend)
    return float(score), int(length)


def local_align(tokens_a: Sequence[str], tokens_b: Sequence[str], params: AlignmentParams | None = None, traceback: bool = True) -> AlignmentResult:
    """Best local alignment of two token sequences (case-insensitive token equality).

    Spans are half-open token index ranges. With ``traceback=False`` only the
    score, aligned length and end position are computed, in memory linear in
    the shorter sequence; the returned spans are then ``(end, end)``.
    """
    params = params or AlignmentParams()
    if len(tokens_a) == 0 or len(tokens_b) == 0:
        return AlignmentResult(0.0, (0, 0), (0, 0), 0, () if traceback else None)
    a, b = _encode_pair(tokens_a, tokens_b)
    swap = b.shape[0] > a.shape[0]
    if swap:
        a, b = b, a
    args = (params.match, params.mismatch, params.gap_open, params.gap_extend)
    if not traceback:
        score, length, ei, ej = _sw_score(a, b, *args)
        if swap:
            ei, ej = ej, ei
        return AlignmentResult(float(score), (int(ei), int(ei)), (int(ej), int(ej)), int(length))
    score, ci, cj = _sw_full(a, b, *args)
    if swap:
        ci, cj = cj, ci
    cols = tuple(zip(ci.tolist(), cj.tolist()))
    if not cols:
        return AlignmentResult(0.0, (0, 0), (0, 0), 0, ())
    ia = [i for i, _ in cols if i >= 0]
    jb = [j for _, j in cols if j >= 0]
    aligned = sum(1 for i, j in cols if i >= 0 and j >= 0)
    return AlignmentResult(float(score), (ia[0], ia[-1] + 1), (jb[0], jb[-1] + 1), aligned, cols)


def rescore(tokens_a: Sequence[str], tokens_b: Sequence[str], columns, params: AlignmentParams) -> float:
    """Score an explicit alignment (as produced by traceback) under the affine gap model."""
    total = 0.0
    prev_kind = None
    for i, j in columns:
        if i >= 0 and j >= 0:
            total += params.match if tokens_a[i].lower() == tokens_b[j].lower() else params.mismatch
            kind = "M"
        else:
            kind = "X" if i < 0 else "Y"
            total += params.gap_extend if kind == prev_kind else params.gap_open
        prev_kind = kind
    return total


def features_from_score(raw: float, aligned_len: int, len_a: int, len_b: int, params: AlignmentParams) -> np.ndarray:
    if len_a == 0 or len_b == 0:
        return np.zeros(4)
    lo, hi = min(len_a, len_b), max(len_a, len_b)
    return np.array(
        [
            min(max(raw / (params.match * lo), 0.0), 1.0),
            raw / (params.match * hi),
            aligned_len / lo,
            abs(math.log(len_a / len_b)),
        ]
    )


def similarity_features(tokens_a: Sequence[str], tokens_b: Sequence[str], params: AlignmentParams | None = None) -> np.ndarray:
    """``[score/(match*min_len), score/(match*max_len), aligned/min_len, |ln(len_a/len_b)|]``."""
    params = params or AlignmentParams()
    if len(tokens_a) == 0 or len(tokens_b) == 0:
        return np.zeros(4)
    a, b = _encode_pair(tokens_a, tokens_b)
    raw, length = score_codes(a, b, params)
    return features_from_score(raw, length, len(tokens_a), len(tokens_b), params)


class AlignmentBatch:
    """All-pairs driver: encodes each sequence once and scores pairs on worker threads.

    The kernel releases the GIL, so threads give real parallelism. Output
    order always follows input order.
    """

    def __init__(self, sequences: dict[Hashable, Sequence[str]], params: AlignmentParams | None = None):
        self.params = params or AlignmentParams()
        vocab = Vocabulary()
        self._codes = {key: vocab.encode(toks) for key, toks in sequences.items()}

    def __contains__(self, key) -> bool:
        return key in self._codes

    def _one(self, pair) -> tuple[float, np.ndarray]:
        a, b = self._codes[pair[0]], self._codes[pair[1]]
        raw, length = score_codes(a, b, self.params)
        return raw, features_from_score(raw, length, a.shape[0], b.shape[0], self.params)

    def _chunk(self, pairs):
        return [self._one(p) for p in pairs]

    def run(self, pairs: Sequence[tuple[Hashable, Hashable]], jobs: int = 1) -> list[tuple[float, np.ndarray]]:
        missing = [k for p in pairs for k in p if k not in self._codes]
        if missing:
            raise KeyError(f"unknown sequence id {missing[0]!r}")
        if jobs <= 1 or len(pairs) < 2:
            return self._chunk(pairs)
        size = math.ceil(len(pairs) / jobs)
        chunks = [pairs[k : k + size] for k in range(0, len(pairs), size)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(self._chunk, chunks))
        return [r for part in parts for r in part]
