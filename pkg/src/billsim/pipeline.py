"""Glue between alignment features, the classifier and bill aggregation."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from billsim.aggregate import BillSimilarity, similarity_from_matrix
from billsim.align import FEATURE_NAMES, AlignmentBatch, AlignmentParams
from billsim.classify import LabeledPair, PairClassifier
from billsim.corpus import Subsection, tokenize


def token_pair_features(pairs: Sequence[tuple[Sequence[str], Sequence[str]]], params: AlignmentParams, jobs: int = 1) -> np.ndarray:
    seqs = {}
    keys = []
    for k, (a, b) in enumerate(pairs):
        seqs[("a", k)] = a
        seqs[("b", k)] = b
        keys.append((("a", k), ("b", k)))
    batch = AlignmentBatch(seqs, params)
    rows = [f for _, f in batch.run(keys, jobs)]
    return np.vstack(rows) if rows else np.zeros((0, len(FEATURE_NAMES)))


def labeled_pair_features(pairs: Sequence[LabeledPair], params: AlignmentParams, jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    for p in pairs:
        if p.text_a is None or p.text_b is None:
            raise ValueError(f"pair {p.id_a},{p.id_b} has no text attached")
    X = token_pair_features([(tokenize(p.text_a), tokenize(p.text_b)) for p in pairs], params, jobs)
    return X, np.array([p.label for p in pairs], dtype=np.int64)


class SubsectionLabeler:
    """Labels subsection pairs with a trained model.

    Pairs without a single shared token, or whose alignment score is zero,
    are labelled 0 without consulting the classifier.
    """

    def __init__(self, model: PairClassifier, subsections: Sequence[Subsection], jobs: int = 1):
        self.model = model
        self.jobs = jobs
        self._vocab = {s.subsection_id: frozenset(t.lower() for t in s.tokens) for s in subsections}
        self._batch = AlignmentBatch({s.subsection_id: s.tokens for s in subsections}, model.params_used)

    def label_pairs(self, pairs: Sequence[tuple[str, str]]) -> np.ndarray:
        labels = np.zeros(len(pairs), dtype=np.int64)
        todo = [k for k, (a, b) in enumerate(pairs) if not self._vocab[a].isdisjoint(self._vocab[b])]
        if not todo:
            return labels
        feats = np.vstack([f for _, f in self._batch.run([pairs[k] for k in todo], self.jobs)])
        live = feats[:, 0] > 0
        if live.any():
            pred = self.model.predict_labels(feats[live])
            labels[np.asarray(todo)[live]] = pred
        return labels

    def bill_similarity(self, bill_i: str, subs_i: Sequence[Subsection], bill_j: str, subs_j: Sequence[Subsection]) -> BillSimilarity:
        if not subs_i or not subs_j:
            raise ValueError(f"bill pair ({bill_i}, {bill_j}): both bills need subsections")
        pairs = [(s.subsection_id, t.subsection_id) for s in subs_i for t in subs_j]
        matrix = self.label_pairs(pairs).reshape(len(subs_i), len(subs_j))
        return similarity_from_matrix(bill_i, bill_j, matrix)
