"""Section categories, bill-level similarity and co-occurrence binning."""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from billsim.corpus import Subsection


class SectionCategory(IntEnum):
    DIFFERENT_TOPIC = 0
    SAME_TOPIC_DIFFERENT_IDEA = 1
    LIKELY_POLICY_IDEA_MATCH = 2
    CLEAR_POLICY_IDEA_MATCH = 3

    @property
    def label(self) -> str:
        return {
            0: "Different Topic",
            1: "Same Topic, Different Idea",
            2: "Likely Policy Idea Match",
            3: "Clear Policy Idea Match",
        }[int(self)]


_SECTION_OF_LABEL = (
    SectionCategory.DIFFERENT_TOPIC,
    SectionCategory.SAME_TOPIC_DIFFERENT_IDEA,
    SectionCategory.LIKELY_POLICY_IDEA_MATCH,
    SectionCategory.CLEAR_POLICY_IDEA_MATCH,
    SectionCategory.CLEAR_POLICY_IDEA_MATCH,
)

# hand-coded section alignment codes: 1 clear ... 4 different; 5 boilerplate and 6 junk are dropped
_HAND_CODES = {
    1: SectionCategory.CLEAR_POLICY_IDEA_MATCH,
    2: SectionCategory.LIKELY_POLICY_IDEA_MATCH,
    3: SectionCategory.SAME_TOPIC_DIFFERENT_IDEA,
    4: SectionCategory.DIFFERENT_TOPIC,
}
DISCARDED_HAND_CODES = frozenset({5, 6})


def map_section_labels(label: int) -> SectionCategory:
    if isinstance(label, bool) or label not in range(5):
        raise ValueError(f"relation label must be in 0..4, got {label!r}")
    return _SECTION_OF_LABEL[label]


def category_from_hand_code(code: int) -> SectionCategory | None:
    """Hand-coded alignment category, or None for the discarded codes."""
    if code in DISCARDED_HAND_CODES:
        return None
    if code not in _HAND_CODES:
        raise ValueError(f"unknown section alignment code {code!r}")
    return _HAND_CODES[code]


@dataclass(frozen=True)
class BillSimilarity:
    bill_i: str
    bill_j: str
    sigma_ij: float
    sigma_ji: float
    sigma_star_ij: float
    sigma_star_ji: float

    @property
    def score(self) -> float:
        return max(self.sigma_star_ij, self.sigma_star_ji)


PairLabelFn = Callable[[Subsection, Subsection], int]


def similarity_from_matrix(bill_i: str, bill_j: str, labels: np.ndarray) -> BillSimilarity:
    """Scores from a |B_i| x |B_j| matrix of relation labels."""
    labels = np.asarray(labels)
    if labels.ndim != 2 or 0 in labels.shape:
        raise ValueError("both bills need at least one subsection")
    if labels.min() < 0 or labels.max() > 4:
        raise ValueError("relation labels must lie in 0..4")
    s_ij = float(labels.max(axis=1).sum())
    s_ji = float(labels.max(axis=0).sum())
    n_i, n_j = labels.shape
    return BillSimilarity(bill_i, bill_j, s_ij, s_ji, s_ij / (4 * n_i), s_ji / (4 * n_j))


def bill_similarity(bill_i: Sequence[Subsection], bill_j: Sequence[Subsection], pair_label_fn: PairLabelFn, ids: tuple[str, str] | None = None) -> BillSimilarity:
    if not bill_i or not bill_j:
        raise ValueError("bill_similarity needs two nonempty bills")
    labels = np.zeros((len(bill_i), len(bill_j)), dtype=np.int64)
    for r, s in enumerate(bill_i):
        for c, t in enumerate(bill_j):
            v = pair_label_fn(s, t)
            if v not in range(5):
                raise ValueError(f"pair_label_fn returned {v!r} for ({s.subsection_id}, {t.subsection_id})")
            labels[r, c] = v
    ids = ids or (bill_i[0].bill_id, bill_j[0].bill_id)
    return similarity_from_matrix(ids[0], ids[1], labels)


# -- co-occurrence bins ----------------------------------------------------

BINS = ("300-3000", "200-299", "100-199", "50-99", "5-49", "1-4", "0")
_BIN_LOWER = (300, 200, 100, 50, 5, 1, 0)


def bin_of(count: int) -> str:
    """Bin name for a co-occurrence count; counts above 3000 stay in the top bin."""
    if count < 0:
        raise ValueError("co-occurrence counts must be >= 0")
    for name, lo in zip(BINS, _BIN_LOWER):
        if count >= lo:
            return name
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class CooccurrenceRecord:
    bill_i: str
    bill_j: str
    count: int

    @property
    def bin(self) -> str:
        return bin_of(self.count)


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def merge_records(records: Iterable[tuple[str, str, int]]) -> dict[tuple[str, str], int]:
    """Unordered pair -> summed count; self-pairs are ignored."""
    merged: dict[tuple[str, str], int] = {}
    for a, b, c in records:
        if c < 0:
            raise ValueError(f"negative co-occurrence count for ({a}, {b})")
        if a == b:
            continue
        k = _key(a, b)
        merged[k] = merged.get(k, 0) + int(c)
    return merged


def cooccurrence_bins(records: Iterable[tuple[str, str, int]], subsection_counts: Mapping[str, int], min_subsections: int = 10, per_bin_cap: int = 600, seed: int = 0) -> list[CooccurrenceRecord]:
    """Bin the eligible pairs and keep a seeded sample of at most ``per_bin_cap`` per bin.

    Pairs touching a bill with fewer than ``min_subsections`` subsections (or
    unknown to the corpus) are dropped. The "0" bin is drawn from eligible
    bill pairs that never co-occur.
    """
    eligible = sorted(b for b, n in subsection_counts.items() if n >= min_subsections)
    ok = set(eligible)
    merged = merge_records(records)
    by_bin: dict[str, list[tuple[str, str]]] = {name: [] for name in BINS}
    for (a, b), c in sorted(merged.items()):
        if a in ok and b in ok:
            by_bin[bin_of(c)].append((a, b))
    rng = np.random.default_rng(seed)
    out = []
    for name in BINS[:-1]:
        pairs = by_bin[name]
        if len(pairs) > per_bin_cap:
            pick = np.sort(rng.choice(len(pairs), size=per_bin_cap, replace=False))
            pairs = [pairs[k] for k in pick]
        out.extend(CooccurrenceRecord(a, b, merged[(a, b)]) for a, b in pairs)
    out.extend(CooccurrenceRecord(a, b, 0) for a, b in _never_cooccurring(eligible, merged, per_bin_cap, rng))
    return out


def _never_cooccurring(eligible: list[str], merged: Mapping[tuple[str, str], int], k: int, rng: np.random.Generator) -> list[tuple[str, str]]:
    n = len(eligible)
    total = n * (n - 1) // 2
    ok = set(eligible)
    seen = {p for p, c in merged.items() if c > 0 and p[0] in ok and p[1] in ok}
    k = min(k, total - len(seen))
    if k <= 0:
        return []
    if 2 * k > total - len(seen):
        # dense case: enumerate the complement outright
        cands = [(eligible[i], eligible[j]) for i in range(n) for j in range(i + 1, n) if (eligible[i], eligible[j]) not in seen]
        idx = rng.choice(len(cands), size=k, replace=False)
        return sorted(cands[t] for t in idx)
    picked: set[tuple[str, str]] = set()
    while len(picked) < k:
        i, j = rng.choice(n, size=2, replace=False)
        p = _key(eligible[i], eligible[j])
        if p not in seen:
            picked.add(p)
    return sorted(picked)


def bin_summary(rows: Iterable[tuple[str, float]]) -> list[dict]:
    """Per-bin count, mean and median of bill similarity, in bin order."""
    groups: dict[str, list[float]] = {}
    for name, score in rows:
        groups.setdefault(name, []).append(score)
    out = []
    for name in BINS:
        vals = groups.get(name, [])
        if vals:
            out.append({"bin": name, "n": len(vals), "mean": statistics.fmean(vals), "median": statistics.median(vals)})
    return out
