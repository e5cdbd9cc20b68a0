import random
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from billsim.corpus import Subsection
from billsim.synth import (
    SynonymLexicon,
    SynthConfig,
    chunk_edit,
    chunk_segments,
    generate_dataset,
    generate_pair,
    multiset_overlap,
    pair_from_record,
    pair_record,
    pair_rng,
    swap_and_synonym,
)

FIXTURES = Path(__file__).parent / "fixtures"
LEX = SynonymLexicon({"grant": ["award", "subsidy"], "entity": ["organization"], "the": ["thee"]})


def anchor() -> Subsection:
    return Subsection.from_text("anchor-bill/s1.0", "anchor-bill", (FIXTURES / "anchor_200.txt").read_text().strip())


def pool() -> list[Subsection]:
    lines = (FIXTURES / "pool.txt").read_text().splitlines()
    subs = [Subsection.from_text(f"p{k}/s0.0", f"p{k}", line) for k, line in enumerate(lines) if line.strip()]
    return [anchor()] + subs


def test_fixture_sizes():
    assert 200 <= anchor().word_count <= 215
    assert len(pool()) == 5


# -- swap / synonym ---------------------------------------------------------


def test_zero_ops_is_identity():
    toks = "the secretary shall award grants".split()
    assert swap_and_synonym(toks, 0, LEX, random.Random(1)) == toks


def test_single_swap_keeps_multiset():
    toks = [f"w{k}" for k in range(20)]
    empty = SynonymLexicon({})
    for seed in range(20):
        out = swap_and_synonym(toks, 1, empty, random.Random(seed))
        assert Counter(out) == Counter(toks)
        assert sum(a != b for a, b in zip(out, toks)) == 2


def test_synonym_replaces_one_word_and_keeps_case():
    # on a single token every operation is either a synonym or a no-op
    for seed in range(10):
        trace: list = []
        out = swap_and_synonym(["Grant"], 1, LEX, random.Random(seed), trace=trace)
        if trace[0][0] == "synonym":
            assert out[0] in ("Award", "Subsidy")
        else:
            assert out == ["Grant"]
    assert swap_and_synonym(["GRANT"], 20, LEX, random.Random(4))[0] in ("GRANT", "AWARD", "SUBSIDY")


def test_stopwords_never_replaced():
    assert "the" not in LEX.entries
    trace: list = []
    out = swap_and_synonym(["the", "the", "the"], 10, LEX, random.Random(3), trace=trace)
    assert out == ["the", "the", "the"]
    assert {t[0] for t in trace} <= {"swap"}


def test_op_cap():
    trace: list = []
    swap_and_synonym([f"w{k}" for k in range(100)], 50, LEX, random.Random(0), cap=20, trace=trace)
    assert len(trace) == 20


def test_single_token_swap_is_noop():
    trace: list = []
    assert swap_and_synonym(["alone"], 3, SynonymLexicon({}), random.Random(0), trace=trace) == ["alone"]
    assert trace == [("noop",)] * 3


def test_negative_ops_rejected():
    with pytest.raises(ValueError):
        swap_and_synonym(["a"], -1, LEX, random.Random(0))


def test_lexicon_tsv(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("# comment\nGrant\taward, subsidy\n\nfund\tfinance\n")
    lex = SynonymLexicon.from_tsv(p)
    assert lex.synonyms("grant") == ("award", "subsidy")
    assert lex.synonyms("FUND") == ("finance",)
    p.write_text("broken line\n")
    with pytest.raises(ValueError, match="lex.tsv:1"):
        SynonymLexicon.from_tsv(p)


def test_default_lexicon_loads():
    lex = SynonymLexicon.default()
    assert len(lex) >= 500
    assert all(w not in lex.stopwords for w in lex.entries)


# -- chunk edit ------------------------------------------------------------


def test_zero_modification_is_identity():
    a = [f"a{k}" for k in range(50)]
    assert chunk_edit(a, ["b"] * 10, 0.0, random.Random(0)) == a


def test_delete_only_is_sub_multiset():
    a = [f"a{k}" for k in range(100)]
    for seed in range(30):
        out = chunk_edit(a, [f"b{k}" for k in range(40)], 0.3, random.Random(seed), delete_fraction=1.0)
        assert not Counter(out) - Counter(a)
        assert len(out) == 70


@settings(max_examples=80, deadline=None)
@given(st.integers(20, 250), st.integers(5, 80), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_inserted_runs_are_contiguous_pieces_of_b(n_a, n_b, prop, seed):
    a = [f"a{k}" for k in range(n_a)]
    b = [f"b{k}" for k in range(n_b)]
    segs = chunk_segments(a, b, prop, random.Random(seed), SynthConfig())
    b_text = " " + " ".join(b) + " "
    for kind, toks in segs:
        assert toks
        if kind == "B":
            assert 1 <= len(toks) <= 15
            assert " " + " ".join(toks) + " " in b_text
    # no two borrowed chunks are adjacent
    kinds = [k for k, _ in segs]
    assert all(not (x == y == "B") for x, y in zip(kinds, kinds[1:]))
    out = [t for _, toks in segs for t in toks]
    kept = [t for t in out if t.startswith("a")]
    # each budget unit removes at most one token of A; spans that do not fit are dropped
    assert len(kept) >= n_a - round(prop * n_a)
    assert not Counter(kept) - Counter(a)
    # surviving A runs keep their internal order
    for kind, toks in segs:
        if kind == "A":
            idx = [int(t[1:]) for t in toks]
            assert idx == list(range(idx[0], idx[0] + len(idx)))


def test_chunk_edit_rejects():
    with pytest.raises(ValueError):
        chunk_edit([], ["b"], 0.5, random.Random(0))
    with pytest.raises(ValueError):
        chunk_edit(["a"], ["b"], 1.5, random.Random(0))


# -- pairs -----------------------------------------------------------------


def test_class_4_is_verbatim():
    a = anchor()
    p = generate_pair(a, 4, pool(), SynthConfig(), random.Random(0), LEX)
    assert p.id_a == p.id_b == a.subsection_id
    assert p.text_b.split() == list(a.tokens)


def test_class_3_is_a_permutation_up_to_synonyms():
    a = anchor()
    for seed in range(10):
        p = generate_pair(a, 3, pool(), SynthConfig(), random.Random(seed), SynonymLexicon({}))
        assert Counter(p.text_b.split()) == Counter(a.tokens)
        assert p.id_b == f"{a.subsection_id}~3.0"


def test_class_0_comes_from_another_bill():
    a = anchor()
    for seed in range(20):
        p = generate_pair(a, 0, pool(), SynthConfig(), random.Random(seed), LEX)
        assert not p.id_b.startswith("anchor-bill/")


def test_class_0_needs_another_bill():
    a = anchor()
    with pytest.raises(ValueError, match="another bill"):
        generate_pair(a, 0, [a], SynthConfig(), random.Random(0), LEX)


def test_bad_label():
    with pytest.raises(ValueError):
        generate_pair(anchor(), 5, pool(), SynthConfig(), random.Random(0), LEX)


def _overlaps(label, n, seed=7):
    a = anchor()
    cfg, ps = SynthConfig(seed=seed), pool()
    lex = SynonymLexicon.default()
    return np.array([multiset_overlap(a.tokens, generate_pair(a, label, ps, cfg, pair_rng(seed, label, k), lex, k).text_b.split()) for k in range(n)])


def test_related_band_overlap():
    ov = _overlaps(2, 200)
    assert np.mean((ov >= 0.55) & (ov <= 0.85)) >= 0.95


def test_class_means_monotone():
    means = [_overlaps(label, 60).mean() for label in (4, 3, 2, 1, 0)]
    assert means[0] == 1.0
    assert all(x >= y for x, y in zip(means, means[1:]))


def test_dataset_exact_counts_and_deterministic():
    cfg = SynthConfig(seed=11)
    first = list(generate_dataset(pool(), 7, cfg, LEX))
    second = list(generate_dataset(pool(), 7, cfg, LEX))
    assert first == second
    assert Counter(p.label for p in first) == {k: 7 for k in range(5)}
    assert all(p.provenance == "synthetic" for p in first)


def test_dataset_independent_of_class_order():
    cfg = SynthConfig(seed=5)
    full = list(generate_dataset(pool(), 4, cfg, LEX))
    only2 = list(generate_dataset(pool(), 4, cfg, LEX, classes=(2,)))
    assert [p for p in full if p.label == 2] == only2


def test_seed_changes_output():
    a = list(generate_dataset(pool(), 5, SynthConfig(seed=1), LEX, classes=(2,)))
    b = list(generate_dataset(pool(), 5, SynthConfig(seed=2), LEX, classes=(2,)))
    assert a != b


def test_empty_pool():
    with pytest.raises(ValueError):
        list(generate_dataset([], 1, SynthConfig(), LEX))


def test_record_round_trip():
    p = next(generate_dataset(pool(), 1, SynthConfig(), LEX, classes=(2,)))
    rec = pair_record(p, 0)
    assert rec["seed"] == 0 and rec["id_x"] == p.id_b
    assert pair_from_record(rec) == p
    del rec["text_x"]
    with pytest.raises(ValueError):
        pair_from_record(rec)


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(related_band=(0.5, 0.4))
    with pytest.raises(ValueError):
        SynthConfig(chunk_words_min=0)
    with pytest.raises(ValueError):
        SynthConfig(seed=-1)


def test_multiset_overlap():
    assert multiset_overlap(["a", "a", "b"], ["A", "c"]) == pytest.approx(1 / 3)
    assert multiset_overlap([], ["a"]) == 0.0
