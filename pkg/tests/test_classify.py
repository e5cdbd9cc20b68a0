import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import central_difference
from billsim.align import AlignmentParams
from billsim.classify import (
    DEFAULT_GRID,
    DatasetSplit,
    LabeledPair,
    PairClassifier,
    fit,
    grid_search,
    inverse_frequency_weights,
    loss_and_grad,
    predict,
    train,
    train_arrays,
    two_stage_arrays,
)


def loss_by_loops(W, X, y, C, norm):
    """Cross-entropy plus penalty, one sample and one class at a time."""
    total = 0.0
    for x, label in zip(X, y):
        z = [sum(W[k, f] * x[f] for f in range(len(x))) + W[k, -1] for k in range(W.shape[0])]
        m = max(z)
        total += m + math.log(sum(math.exp(v - m) for v in z)) - z[label]
    if norm == "l2":
        total += sum(W[k, f] ** 2 for k in range(W.shape[0]) for f in range(W.shape[1] - 1)) / (2 * C)
    return total


def blobs(seed, n_per=30, spread=0.4):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.1, 0.0, 0.1, 1.0], [0.3, 0.2, 0.3, 0.8], [0.5, 0.4, 0.5, 0.5], [0.8, 0.7, 0.8, 0.2], [1.0, 1.0, 1.0, 0.0]])
    X = np.vstack([c + spread * rng.normal(size=(n_per, 4)) * 0.1 for c in centers])
    y = np.repeat(np.arange(5), n_per)
    return X, y


def test_loss_matches_loop_oracle():
    rng = np.random.default_rng(0)
    X, y = rng.normal(size=(12, 4)), rng.integers(0, 5, 12)
    W = rng.normal(size=(5, 5))
    for norm in ("l2", "none"):
        assert loss_and_grad(W, X, y, 0.7, norm)[0] == pytest.approx(loss_by_loops(W, X, y, 0.7, norm), rel=1e-12)


def test_zero_weights_loss_is_n_log_5():
    X, y = blobs(1)
    assert loss_and_grad(np.zeros((5, 5)), X, y)[0] == pytest.approx(len(y) * math.log(5))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 15))
        X, y = rng.normal(size=(n, 4)), rng.integers(0, 5, n)
        W = rng.normal(size=(5, 5))
        C = float(10 ** rng.uniform(-2, 2))
        norm = "l2" if rng.random() < 0.5 else "none"
        g = loss_and_grad(W, X, y, C, norm)[1]
        fd = central_difference(lambda V: loss_and_grad(V, X, y, C, norm)[0], W)
        worst = max(worst, float(np.abs(g - fd).max() / max(np.abs(fd).max(), 1e-12)))
    assert worst < 1e-5


def test_loss_history_monotone():
    X, y = blobs(2)
    for norm in ("l2", "none"):
        _, hist = fit(X, y, 1.0, norm)
        assert all(b <= a for a, b in zip(hist, hist[1:]))
        assert hist[-1] < hist[0]


def test_separable_two_point_example():
    X = np.array([[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]])
    y = np.array([0, 4])
    m = train_arrays(X, y, C=1e3)
    assert list(m.predict_labels(X)) == [0, 4]
    assert m.predict_proba(X)[0, 0] > 0.5 and m.predict_proba(X)[1, 4] > 0.5


def test_zero_model_is_uniform_and_ties_to_class_0():
    m = PairClassifier(np.zeros((5, 5)))
    np.testing.assert_allclose(m.predict_proba([[0.3, 0.1, 0.2, 0.0]]), [[0.2] * 5])
    label, probs = predict(m, [0.3, 0.1, 0.2, 0.0])
    assert label == 0 and probs.sum() == pytest.approx(1.0)


def test_hand_softmax():
    W = np.zeros((5, 5))
    W[:, -1] = [0.0, math.log(2), math.log(3), math.log(4), 0.0]
    # exp of the logits is 1, 2, 3, 4, 1 which sums to 11
    np.testing.assert_allclose(PairClassifier(W).predict_proba([[0, 0, 0, 0]])[0], np.array([1, 2, 3, 4, 1]) / 11)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=25, max_size=25), st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_probabilities_form_a_distribution(w, x):
    m = PairClassifier(np.array(w).reshape(5, 5))
    p = m.predict_proba([x])[0]
    assert np.all(p >= 0) and p.sum() == pytest.approx(1.0, abs=1e-12)
    assert int(m.predict_labels([x])[0]) == int(np.argmax(p))


def test_training_is_bitwise_reproducible():
    X, y = blobs(3)
    a, b = train_arrays(X, y), train_arrays(X, y)
    assert a.weights.tobytes() == b.weights.tobytes()


def test_trained_model_beats_chance():
    X, y = blobs(4)
    m = train_arrays(X, y, C=10.0)
    assert np.mean(m.predict_labels(X) == y) > 0.6


def test_training_rejections():
    with pytest.raises(ValueError, match="2 distinct"):
        train_arrays(np.zeros((3, 4)), np.zeros(3, dtype=int))
    X = np.zeros((2, 4))
    X[1, 2] = np.nan
    with pytest.raises(ValueError, match="row 1"):
        train_arrays(X, np.array([0, 1]))
    with pytest.raises(ValueError):
        fit(np.zeros((2, 4)), np.array([0, 1]), norm="l1")
    with pytest.raises(ValueError):
        fit(np.zeros((2, 4)), np.array([0, 1]), C=0)


def test_balanced_weights():
    w = inverse_frequency_weights(np.array([0, 0, 0, 1]))
    # each present class carries half the total weight
    assert w.tolist() == [4 / 6, 4 / 6, 4 / 6, 2.0]


def test_two_stage_without_synthetic_equals_single_stage():
    X, y = blobs(5)
    single = train_arrays(X, y)
    two = two_stage_arrays(np.zeros((0, 4)), np.zeros(0, dtype=int), X, y)
    assert two.weights.tobytes() == single.weights.tobytes()
    assert two.train_meta["stages"][0] == {"name": "synthetic", "n": 0, "skipped": True}


def test_two_stage_warm_start():
    Xs, ys = blobs(6, spread=0.2)
    Xh, yh = blobs(7, n_per=6)
    first = train_arrays(Xs, ys)
    two = two_stage_arrays(Xs, ys, Xh, yh)
    stages = two.train_meta["stages"]
    assert [s["name"] for s in stages] == ["synthetic", "human"]
    # the second stage starts where the first finished
    assert stages[1]["initial_loss"] == pytest.approx(loss_and_grad(first.weights, Xh, yh)[0])
    cold = train_arrays(Xh, yh)
    assert not np.array_equal(cold.weights, two.weights)
    with pytest.raises(ValueError):
        two_stage_arrays(Xs, ys, np.zeros((0, 4)), np.zeros(0, dtype=int))


def test_scaling_invariance_without_penalty():
    X, y = blobs(8)
    X = X[[0, 30, 60, 90, 120, 1, 31]]
    y = y[[0, 30, 60, 90, 120, 1, 31]]
    base = train_arrays(X, y, norm="none").predict_labels(X)
    scaled = train_arrays(X * 3.0, y, norm="none").predict_labels(X * 3.0)
    assert np.mean(base == scaled) >= 6 / 7


def test_model_round_trip():
    X, y = blobs(9)
    m = train_arrays(X, y, params=AlignmentParams(1, -1, -1, -0.25))
    back = PairClassifier.from_dict(m.to_dict())
    assert back.weights.tobytes() == m.weights.tobytes()
    assert back.params_used == m.params_used and back.train_meta == m.train_meta
    bad = m.to_dict()
    del bad["params_used"]
    with pytest.raises(ValueError, match="params_used"):
        PairClassifier.from_dict(bad)
    with pytest.raises(ValueError):
        PairClassifier(np.zeros((4, 5)))


def test_model_rejects_wrong_width():
    with pytest.raises(ValueError):
        PairClassifier(np.zeros((5, 5))).predict_proba([[1.0, 2.0]])


# -- pairs, splits, grid ---------------------------------------------------


def labeled(X, y):
    pairs = [LabeledPair(f"a{k}", f"b{k}", int(label)) for k, label in enumerate(y)]
    table = {p.key: row for p, row in zip(pairs, X)}
    return pairs, (lambda p: table[p.key])


def test_labeled_pair_validation():
    with pytest.raises(ValueError):
        LabeledPair("a", "b", 5)
    with pytest.raises(ValueError):
        LabeledPair("a", "a", 2)
    with pytest.raises(ValueError):
        LabeledPair("a", "b", 1, provenance="guess")
    assert LabeledPair("a", "a", 4, "synthetic").label == 4
    assert LabeledPair("z", "a", 1).key == ("a", "z")


def test_split_sizes_and_determinism():
    pairs = [LabeledPair(f"a{k}", f"b{k}", k % 5) for k in range(3305)]
    s = DatasetSplit.from_pairs(pairs, seed=0)
    assert (len(s.train), len(s.validation), len(s.test)) == (2314, 330, 661)
    assert {p.id_a for p in s.train + s.validation + s.test} == {p.id_a for p in pairs}
    assert DatasetSplit.from_pairs(pairs, seed=0) == s
    assert DatasetSplit.from_pairs(pairs, seed=1) != s


def test_train_from_pairs_matches_arrays():
    X, y = blobs(10)
    pairs, fn = labeled(X, y)
    assert train(pairs, fn).weights.tobytes() == train_arrays(X, y).weights.tobytes()


def test_default_grid_has_fourteen_cells():
    assert len(DEFAULT_GRID) == 14
    assert {n for _, n in DEFAULT_GRID} == {"l2", "none"}


def test_single_cell_grid():
    X, y = blobs(11)
    pairs, fn = labeled(X, y)
    split = DatasetSplit.from_pairs(pairs, seed=3)
    res = grid_search(split, fn, [(1.0, "l2")])
    assert (res.C, res.norm) == (1.0, "l2") and len(res.cells) == 1
    Xt = np.vstack([fn(p) for p in split.train])
    assert res.model.weights.tobytes() == train_arrays(Xt, np.array([p.label for p in split.train])).weights.tobytes()


def test_grid_ties_prefer_stronger_regularisation():
    X, y = blobs(12, spread=0.01)
    pairs, fn = labeled(X * 20, y)
    split = DatasetSplit.from_pairs(pairs, seed=0)
    # well separated data: every cell in this grid reaches the same validation score
    res = grid_search(split, fn, [(10.0, "l2"), (1.0, "none"), (1.0, "l2")])
    assert len({c["val_macro_f1"] for c in res.cells}) == 1
    assert (res.C, res.norm) == (1.0, "l2")


def test_empty_grid():
    X, y = blobs(13)
    pairs, fn = labeled(X, y)
    with pytest.raises(ValueError):
        grid_search(DatasetSplit.from_pairs(pairs, 0), fn, [])
