import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from billsim.artifacts import (
    ProvenanceError,
    csv_text,
    make_meta,
    merge_sections,
    parse_csv,
    read_json,
    read_jsonl,
    write_json,
    write_jsonl,
)
from billsim.classify import PairClassifier
from billsim.config import ConfigError, RunConfig
from billsim.corpus import Subsection
from billsim.metrics import evaluate
from billsim.pipeline import SubsectionLabeler
from billsim.report import eval_csv, eval_rows, eval_text, parse_eval_csv, parse_summary_csv, summary_csv, summary_text

TABLE_ROWS = ["4 Identical", "3 Almost Identical", "2 Related", "1 Partially Related", "0 Unrelated", "Accuracy", "Average Macro F1"]


def test_eval_rows_follow_table_layout():
    rep = evaluate([0, 1, 2, 3, 4, 4], [0, 1, 2, 3, 4, 3])
    rows = eval_rows(rep)
    assert [r[0] for r in rows] == TABLE_ROWS
    assert rows[0][1] == rep.per_class_f1[4] and rows[-1][1] == rep.macro_f1
    text = eval_text(rep)
    for name in TABLE_ROWS:
        assert name in text


def test_four_category_rows():
    rep = evaluate([0, 1, 2, 3], [0, 1, 2, 2], n_classes=4)
    assert [r[0] for r in eval_rows(rep)][:4] == ["3 Clear Policy Idea Match", "2 Likely Policy Idea Match", "1 Same Topic, Different Idea", "0 Different Topic"]


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=40))
def test_eval_csv_round_trip(pairs):
    g, p = zip(*pairs)
    rep = evaluate(g, p)
    meta = make_meta("evaluation", {"x": "1"})
    assert parse_eval_csv(eval_csv(rep, meta)) == rep


def test_eval_csv_missing_metric():
    text = "metric,value\nf1_0,1.0\n"
    with pytest.raises(ValueError, match="missing metric"):
        parse_eval_csv(text)


def test_empty_summary_renders():
    text = summary_text([])
    assert text.splitlines()[0].split() == ["Bin", "Pairs", "Mean", "Median"]
    assert len(text.splitlines()) == 2
    assert parse_summary_csv(summary_csv([])) == []


def test_summary_round_trip():
    rows = [{"bin": "300-3000", "n": 3, "mean": 0.1 + 0.2, "median": 1 / 3}, {"bin": "0", "n": 1, "mean": 0.0, "median": 0.0}]
    assert parse_summary_csv(summary_csv(rows, make_meta("bin_summary", {}))) == rows


def test_summary_schema_mismatch():
    with pytest.raises(ValueError, match="median"):
        parse_summary_csv("bin,n,mean\n0,1,0.5\n")


# -- artifacts -------------------------------------------------------------


def test_meta_is_deterministic_and_timestamp_free():
    a = make_meta("x", {"b": "2", "a": "1"}, seed=3)
    b = make_meta("x", {"a": "1", "b": "2"}, seed=3)
    assert a == b and list(a["sections"]) == ["a", "b"]
    assert set(a) == {"tool", "version", "kind", "seed", "config_hash", "sections"}


def test_merge_sections():
    m1, m2 = make_meta("a", {"filter": "f1", "synth": "s"}), make_meta("b", {"filter": "f1", "align": "x"})
    assert merge_sections([m1, m2]) == {"filter": "f1", "synth": "s", "align": "x"}
    bad = make_meta("c", {"filter": "f2"})
    with pytest.raises(ProvenanceError, match="filter"):
        merge_sections([m1, bad])
    assert merge_sections([m1, bad], allow_mixed=True)["filter"] == "f1"


def test_jsonl_round_trip(tmp_path):
    meta = make_meta("things", {"s": "1"})
    recs = [{"a": 1, "t": "é"}, {"a": 2}]
    write_jsonl(tmp_path / "x.jsonl", meta, recs)
    got_meta, it = read_jsonl(tmp_path / "x.jsonl", kinds=["things"])
    assert got_meta == meta and list(it) == recs
    with pytest.raises(ProvenanceError, match="expected a other"):
        read_jsonl(tmp_path / "x.jsonl", kinds=["other"])


def test_jsonl_without_header(tmp_path):
    (tmp_path / "x.jsonl").write_text('{"a": 1}\n\n{"a": 2}\n')
    with pytest.raises(ProvenanceError, match="missing"):
        read_jsonl(tmp_path / "x.jsonl")
    meta, it = read_jsonl(tmp_path / "x.jsonl", require_meta=False)
    assert meta is None and list(it) == [{"a": 1}, {"a": 2}]
    (tmp_path / "y.jsonl").write_text('{"a": 1}\n{oops\n')
    _, it = read_jsonl(tmp_path / "y.jsonl", require_meta=False)
    with pytest.raises(ValueError, match="y.jsonl:2"):
        list(it)


def test_foreign_version_rejected(tmp_path):
    meta = dict(make_meta("model", {}), version="0.0.0-other")
    write_json(tmp_path / "m.json", {"meta": meta})
    with pytest.raises(ProvenanceError, match="0.0.0-other"):
        read_json(tmp_path / "m.json")


def test_csv_round_trip():
    meta = make_meta("rows", {"a": "b"})
    text = csv_text(meta, ["id", "v"], [("x,y", 0.1), ("z", 1e-300)])
    got_meta, rows = parse_csv(text, "t", ["id", "v"])
    assert got_meta == meta
    assert rows == [{"id": "x,y", "v": "0.1"}, {"id": "z", "v": "1e-300"}]
    with pytest.raises(ValueError, match="missing column"):
        parse_csv(text, "t", ["w"])
    with pytest.raises(ValueError, match="malformed"):
        parse_csv("# meta {nope\nid\n", "t", ["id"])


# -- config ----------------------------------------------------------------


def test_config_defaults_and_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("seed: 5\nalignment:\n  match: 3\nclassifier:\n  C: 1e-3\n")
    cfg = RunConfig.load(path, ["alignment.gap_open=-4", "sampler.sim_low=0.5"])
    assert cfg.seed == 5 and cfg.alignment.match == 3 and cfg.alignment.gap_open == -4
    assert cfg.classifier["C"] == 0.001
    assert cfg.sampler.sim_low == 0.5
    assert RunConfig.load().filter.slice_max_words == 400


def test_config_errors(tmp_path):
    for bad in (["nope=1"], ["alignment.match=-1"], ["classifier.norm=l1"], ["classifier.C=abc"], ["seed=-1"], ["alignment=3"], ["novalue"]):
        with pytest.raises(ConfigError):
            RunConfig.load(None, bad)
    (tmp_path / "c.yaml").write_text("- a list\n")
    with pytest.raises(ConfigError, match="mapping"):
        RunConfig.load(tmp_path / "c.yaml")


def test_section_hashes_ignore_other_sections():
    a = RunConfig.load(None, ["alignment.match=3"])
    b = RunConfig.load(None, [])
    assert a.section_hashes("filter", "synth") == b.section_hashes("filter", "synth")
    assert a.section_hashes("alignment") != b.section_hashes("alignment")
    # heading order and case do not change the filter hash
    c = RunConfig.load(None, ["filter.boilerplate_headings=[Short Title, severability]"])
    d = RunConfig.load(None, ["filter.boilerplate_headings=[SEVERABILITY, short title]"])
    assert c.section_hashes("filter") == d.section_hashes("filter")


# -- labeler ---------------------------------------------------------------


def test_labeler_skips_pairs_without_shared_tokens():
    W = np.zeros((5, 5))
    W[3, -1] = 5.0  # always predicts class 3 whenever it is consulted
    subs = [Subsection.from_text("a/s0.0", "a", "grant program funds"), Subsection.from_text("b/s0.0", "b", "water quality"), Subsection.from_text("c/s0.0", "c", "grant program funds")]
    lab = SubsectionLabeler(PairClassifier(W), subs)
    assert lab.label_pairs([("a/s0.0", "b/s0.0"), ("a/s0.0", "c/s0.0")]).tolist() == [0, 3]
    sim = lab.bill_similarity("a", subs[:1], "c", subs[2:])
    assert sim.score == 0.75
    with pytest.raises(ValueError):
        lab.bill_similarity("a", [], "c", subs[2:])
