"""Candidate subsection pairs from a cosine-similarity band."""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from billsim.corpus import Subsection

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerConfig:
    sim_low: float = 0.85
    sim_high: float = 1.0
    sample_size: int = 5400
    seed: int = 0
    include_intra_bill: bool = False

    def __post_init__(self):
        if not (0 <= self.sim_low <= self.sim_high <= 1):
            raise ValueError(f"need 0 <= sim_low <= sim_high <= 1, got {self.sim_low}, {self.sim_high}")
        if self.sample_size < 0:
            raise ValueError("sample_size must be >= 0")

    def to_dict(self) -> dict:
        return {
            "sim_low": self.sim_low,
            "sim_high": self.sim_high,
            "sample_size": self.sample_size,
            "include_intra_bill": self.include_intra_bill,
        }


@dataclass
class VectorSet:
    """Row-normalised vectors with their ids and owning bills.

    Rows in ``zero`` had no usable signal; they are kept for lookup but never
    paired.
    """

    ids: list[str]
    bills: list[str]
    matrix: sp.csr_matrix
    zero: set[str]

    def cosine(self, a: str, b: str) -> float:
        i, j = self.ids.index(a), self.ids.index(b)
        return float(self.matrix[i].multiply(self.matrix[j]).sum())


def tfidf_embed(corpus: Sequence[Subsection]) -> VectorSet:
    """TF-IDF with raw counts and idf = ln(1 + N/df), each row L2-normalised."""
    if not corpus:
        raise ValueError("cannot embed an empty corpus")
    vocab: dict[str, int] = {}
    rows, cols, vals = [], [], []
    df: Counter = Counter()
    for r, sub in enumerate(corpus):
        counts = Counter(t.lower() for t in sub.tokens)
        for term, c in counts.items():
            rows.append(r)
            cols.append(vocab.setdefault(term, len(vocab)))
            vals.append(c)
        df.update(counts.keys())
    n = len(corpus)
    idf = np.zeros(len(vocab))
    for term, k in vocab.items():
        idf[k] = math.log(1.0 + n / df[term])
    m = sp.csr_matrix((np.asarray(vals, float), (rows, cols)), shape=(n, len(vocab)))
    m = sp.csr_matrix(m.multiply(idf[None, :]))
    return _normalised(m, [s.subsection_id for s in corpus], [s.bill_id for s in corpus])


def _normalised(m: sp.csr_matrix, ids: list[str], bills: list[str]) -> VectorSet:
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate subsection ids in vector set")
    norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
    zero = {ids[i] for i in np.flatnonzero(norms == 0)}
    for sid in sorted(zero):
        log.warning("%s: zero vector, excluded from sampling", sid)
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return VectorSet(ids, bills, sp.csr_matrix(sp.diags(scale) @ m), zero)


def load_embeddings(path: str | Path, bill_of: dict[str, str]) -> VectorSet:
    """Read ``subsection_id<TAB>v1,v2,...``; every id in ``bill_of`` must be covered."""
    vecs: dict[str, list[float]] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            sid, sep, rest = line.rstrip("\n").partition("\t")
            try:
                v = [float(x) for x in rest.split(",")]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unparsable vector") from None
            if not sep or not v:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>v1,v2,...'")
            if dim is None:
                dim = len(v)
            elif len(v) != dim:
                raise ValueError(f"{path}:{lineno}: dimension {len(v)} != {dim}")
            if not all(math.isfinite(x) for x in v):
                raise ValueError(f"{path}:{lineno}: non-finite vector component")
            vecs[sid] = v
    missing = [s for s in bill_of if s not in vecs]
    if missing:
        raise ValueError(f"embedding file lacks {len(missing)} requested ids, e.g. {missing[0]!r}")
    ids = list(bill_of)
    arr = np.asarray([vecs[s] for s in ids], dtype=float).reshape(len(ids), dim or 0)
    if (arr < 0).any():
        log.info("external embeddings have negative components; all pairs are scored")
    return _normalised(sp.csr_matrix(arr), ids, [bill_of[s] for s in ids])


def band_pairs(vectors: VectorSet, config: SamplerConfig, block: int = 2048) -> list[tuple[str, str, float]]:
    """Every eligible in-band pair, sorted by (id_a, id_b).

    Scores come from blocked sparse products, so only pairs with overlapping
    support are ever materialised. With a positive ``sim_low`` this is exact
    for nonnegative vectors.
    """
    m, ids, bills = vectors.matrix, vectors.ids, vectors.bills
    mt = m.T.tocsc()
    keep = np.array([s not in vectors.zero for s in ids], dtype=bool)
    out = []
    lo, hi = config.sim_low, config.sim_high
    for start in range(0, m.shape[0], block):
        stop = min(start + block, m.shape[0])
        prod = m[start:stop] @ mt
        if lo <= 0.0:
            # zero cosines are in band too, so every pair must be enumerated
            dense = np.asarray(prod.todense())
            rows, cols = np.nonzero(np.ones_like(dense, dtype=bool))
            data = dense[rows, cols]
        else:
            prod = prod.tocoo()
            rows, cols, data = prod.row, prod.col, prod.data
        gi = rows + start
        sel = (gi < cols) & keep[gi] & keep[cols]
        data = np.minimum(data, 1.0)
        sel &= (data >= lo) & (data <= hi)
        for i, j, v in zip(gi[sel], cols[sel], data[sel]):
            if not config.include_intra_bill and bills[i] == bills[j]:
                continue
            a, b = ids[i], ids[j]
            out.append((a, b, float(v)) if a < b else (b, a, float(v)))
    out.sort()
    return out


def candidate_pairs(vectors: VectorSet, config: SamplerConfig) -> list[tuple[str, str, float]]:
    """Seeded uniform sample (without replacement) of the in-band pairs, in sorted order."""
    pool = band_pairs(vectors, config)
    k = min(config.sample_size, len(pool))
    if k == len(pool):
        return pool
    rng = np.random.default_rng(config.seed)
    picked = np.sort(rng.choice(len(pool), size=k, replace=False))
    return [pool[i] for i in picked]
