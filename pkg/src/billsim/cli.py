"""Command-line interface.

Every subcommand reads a YAML config (``--config``) with ``--set key=value``
overrides, writes artifacts whose headers record the configuration sections
they depend on, and exits 0 on success, 1 on usage errors and 2 on data or
validation errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from billsim import __version__
from billsim.artifacts import (
    CSV_PREFIX,
    canonical_json,
    ProvenanceError,
    file_hash,
    make_meta,
    merge_sections,
    read_csv,
    read_json,
    read_jsonl,
    section_hash,
    write_csv,
    write_json,
    write_jsonl,
)
from billsim.config import RunConfig

log = logging.getLogger("billsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- helpers ---------------------------------------------------------------


def _out_dir(path: str) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_subsections(path: str):
    from billsim.corpus import Subsection

    meta, records = read_jsonl(path, kinds=["subsections"])
    subs = [Subsection.from_record(r) for r in records]
    seen = set()
    for s in subs:
        if s.subsection_id in seen:
            raise ValueError(f"{path}: duplicate subsection id {s.subsection_id!r}")
        seen.add(s.subsection_id)
    return meta, subs


def _load_pairs_file(path: str, subs_by_id: dict | None, provenance: str = "human"):
    """Labelled pairs from JSONL (text inline) or CSV ``id_a,id_b,label[,provenance]``."""
    from billsim.classify import LabeledPair
    from billsim.synth import pair_from_record

    if path.endswith(".jsonl"):
        meta, records = read_jsonl(path, require_meta=False)
        pairs = []
        for r in records:
            if "text_x" in r:
                pairs.append(pair_from_record(r))
            else:
                for key in ("id_a", "id_b", "label", "text_a", "text_b"):
                    if key not in r:
                        raise ValueError(f"{path}: pair record missing field {key!r}")
                pairs.append(LabeledPair(str(r["id_a"]), str(r["id_b"]), _label(r["label"], path), r.get("provenance", provenance), r["text_a"], r["text_b"]))
        return meta, pairs
    meta, rows = read_csv(path, ["id_a", "id_b", "label"])
    if subs_by_id is None:
        raise ValueError(f"{path}: CSV pairs need --subsections to supply the texts")
    pairs = []
    for r in rows:
        for key in ("id_a", "id_b"):
            if r[key] not in subs_by_id:
                raise ValueError(f"{path}: unknown subsection id {r[key]!r}")
        a, b = subs_by_id[r["id_a"]], subs_by_id[r["id_b"]]
        pairs.append(LabeledPair(a.subsection_id, b.subsection_id, _label(r["label"], path), r.get("provenance") or provenance, a.text, b.text))
    return meta, pairs


def _label(v, where) -> int:
    try:
        k = int(v)
    except (TypeError, ValueError):
        raise ValueError(f"{where}: label {v!r} is not an integer") from None
    if k not in range(5):
        raise ValueError(f"{where}: label {k} not in 0..4")
    return k


def _load_model(path: str):
    from billsim.classify import PairClassifier

    obj = read_json(path, kinds=["model"])
    return obj["meta"], PairClassifier.from_dict(obj)


def _print(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


# -- subcommands -----------------------------------------------------------


def cmd_ingest(args, cfg: RunConfig) -> int:
    from billsim.corpus import CorpusStats, iter_corpus_dir, prepare_bill
    from billsim.report import stats_text

    corpus = args.corpus or cfg.data["corpus_dir"]
    if not corpus:
        raise UsageError("ingest: --corpus (or corpus_dir in the config) is required")
    if not Path(corpus).is_dir():
        raise ValueError(f"corpus directory {corpus!r} does not exist")
    out = _out_dir(args.out or cfg.data["output_dir"] or ".")
    filt = cfg.filter
    meta = make_meta("subsections", cfg.section_hashes("filter"))
    stats = CorpusStats()
    chambers: dict[str, int] = {}

    def records():
        nonlocal stats
        for bill in iter_corpus_dir(corpus):
            subs, st = prepare_bill(bill, filt)
            stats = stats.merge(st)
            key = bill.chamber.value if bill.chamber else "unknown"
            chambers[key] = chambers.get(key, 0) + 1
            for s in subs:
                yield s.to_record()

    write_jsonl(out / "subsections.jsonl", meta, records())
    report = stats.to_dict()
    report["chambers"] = dict(sorted(chambers.items()))
    write_json(out / "stats.json", {"meta": make_meta("stats", meta["sections"]), "stats": report})
    _print(stats_text(report))
    return 0


def cmd_ngrams(args, cfg: RunConfig) -> int:
    from billsim.corpus import top_common_ngrams

    meta, subs = _load_subsections(args.subsections)
    top = top_common_ngrams(subs, args.n_min, args.n_max, args.top)
    out_meta = make_meta("ngrams", dict(meta["sections"], ngrams=section_hash([args.n_min, args.n_max, args.top])))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_PREFIX + canonical_json(out_meta) + "\n")
        fh.write("ngram\tn\tcount\n")
        for g, c in top:
            fh.write(f"{g}\t{len(g.split())}\t{c}\n")
    return 0


def cmd_sample(args, cfg: RunConfig) -> int:
    from billsim.sampler import candidate_pairs, load_embeddings, tfidf_embed

    meta, subs = _load_subsections(args.subsections)
    sections = dict(meta["sections"], **cfg.section_hashes("sampler", "seed"))
    if args.embeddings:
        vectors = load_embeddings(args.embeddings, {s.subsection_id: s.bill_id for s in subs})
        sections["embeddings"] = file_hash(args.embeddings)
    else:
        if not subs:
            raise ValueError(f"{args.subsections}: no subsections to embed")
        vectors = tfidf_embed(subs)
    pairs = candidate_pairs(vectors, cfg.sampler)
    write_csv(args.out, make_meta("candidates", sections, cfg.seed), ["id_a", "id_b", "cosine"], pairs)
    log.info("%d candidate pairs written", len(pairs))
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    from billsim.synth import generate_dataset, pair_record

    meta, subs = _load_subsections(args.subsections)
    n = args.n_per_class if args.n_per_class is not None else int(cfg.data["synth"]["n_per_class"])
    if n < 0:
        raise ValueError("n_per_class must be >= 0")
    if args.n_per_class is not None:
        cfg.set("synth.n_per_class", n)
    sc = cfg.synth
    sections = dict(meta["sections"], **cfg.section_hashes("synth", "seed"))
    if sc.synonym_lexicon:
        sections["lexicon"] = file_hash(sc.synonym_lexicon)
    records = (pair_record(p, cfg.seed) for p in generate_dataset(subs, n, sc))
    write_jsonl(args.out, make_meta("synthetic", sections, cfg.seed), records)
    return 0


def cmd_align(args, cfg: RunConfig) -> int:
    from billsim.align import FEATURE_NAMES, AlignmentBatch

    meta, subs = _load_subsections(args.subsections)
    pmeta, rows = read_csv(args.pairs, ["id_a", "id_b"])
    metas = [meta] + ([pmeta] if pmeta else [])
    sections = dict(merge_sections(metas, args.allow_mixed), **cfg.section_hashes("alignment"))
    batch = AlignmentBatch({s.subsection_id: s.tokens for s in subs}, cfg.alignment)
    pairs = [(r["id_a"], r["id_b"]) for r in rows]
    for a, b in pairs:
        for k in (a, b):
            if k not in batch:
                raise ValueError(f"{args.pairs}: unknown subsection id {k!r}")
    results = batch.run(pairs, args.jobs)
    out_rows = [(a, b, raw, *map(float, f)) for (a, b), (raw, f) in zip(pairs, results)]
    write_csv(args.out, make_meta("alignments", sections), ["id_a", "id_b", "raw_score", *FEATURE_NAMES], out_rows)
    return 0


def _training_inputs(args):
    subs_by_id = None
    metas = []
    if getattr(args, "subsections", None):
        m, subs = _load_subsections(args.subsections)
        metas.append(m)
        subs_by_id = {s.subsection_id: s for s in subs}
    synthetic, human = [], []
    if getattr(args, "synthetic", None):
        m, synthetic = _load_pairs_file(args.synthetic, subs_by_id, "synthetic")
        if m:
            metas.append(m)
    if getattr(args, "human", None):
        m, human = _load_pairs_file(args.human, subs_by_id, "human")
        if m:
            metas.append(m)
    return metas, synthetic, human


def cmd_train(args, cfg: RunConfig) -> int:
    from billsim.classify import train_arrays, two_stage_arrays
    from billsim.pipeline import labeled_pair_features

    metas, synthetic, human = _training_inputs(args)
    if not synthetic and not human:
        raise UsageError("train: give --synthetic and/or --human pairs")
    clf = cfg.classifier
    params = cfg.alignment
    sections = dict(merge_sections(metas, args.allow_mixed), **cfg.section_hashes("alignment", "classifier"))
    Xs, ys = labeled_pair_features(synthetic, params, args.jobs)
    Xh, yh = labeled_pair_features(human, params, args.jobs)
    if synthetic and human and clf["two_stage"]:
        model = two_stage_arrays(Xs, ys, Xh, yh, clf["C"], clf["norm"], clf["balance"], params)
    else:
        X, y = np.vstack([Xs, Xh]), np.concatenate([ys, yh])
        model = train_arrays(X, y, clf["C"], clf["norm"], None, clf["balance"], params)
    obj = model.to_dict()
    obj["meta"] = make_meta("model", sections, cfg.seed)
    write_json(args.out, obj)
    return 0


def cmd_grid(args, cfg: RunConfig) -> int:
    from billsim.classify import DEFAULT_GRID, DatasetSplit, grid_search
    from billsim.metrics import evaluate
    from billsim.pipeline import labeled_pair_features
    from billsim.report import eval_csv, eval_text

    metas, synthetic, human = _training_inputs(args)
    if not human:
        raise UsageError("grid: --human pairs are required")
    params = cfg.alignment
    split = DatasetSplit.from_pairs(human, cfg.seed)
    grid = [(c, n) for n in (args.norms or ["l2", "none"]) for c in (args.Cs or sorted({c for c, _ in DEFAULT_GRID}))]
    pool = list(split.train) + list(split.validation) + list(split.test) + list(synthetic)
    X, _ = labeled_pair_features(pool, params, args.jobs)
    feats = dict(zip(pool, X))
    result = grid_search(split, feats.__getitem__, grid, synthetic, cfg.classifier["balance"], params)
    sections = dict(merge_sections(metas, args.allow_mixed), **cfg.section_hashes("alignment", "seed"))
    sections["grid"] = section_hash([list(g) for g in grid])
    out = _out_dir(args.out)
    gmeta = make_meta("grid", sections, cfg.seed)
    write_csv(out / "grid.csv", gmeta, ["C", "norm", "val_macro_f1", "val_accuracy"], [(c["C"], c["norm"], c["val_macro_f1"], c["val_accuracy"]) for c in result.cells])
    obj = result.model.to_dict()
    obj["meta"] = make_meta("model", sections, cfg.seed)
    write_json(out / "model.json", obj)
    if split.test:
        Xt = np.vstack([feats[p] for p in split.test])
        rep = evaluate([p.label for p in split.test], result.model.predict_labels(Xt))
        emeta = make_meta("evaluation", sections, cfg.seed)
        write_json(out / "test_eval.json", {"meta": emeta, "report": rep.to_dict()})
        (out / "test_eval.csv").write_text(eval_csv(rep, emeta), encoding="utf-8")
        _print(f"best C = {result.C:g}, norm = {result.norm}\n\n" + eval_text(rep))
    return 0


def cmd_eval(args, cfg: RunConfig) -> int:
    from billsim.metrics import evaluate
    from billsim.pipeline import labeled_pair_features
    from billsim.report import eval_csv, eval_text

    subs_by_id, metas = None, []
    if args.subsections:
        m, subs = _load_subsections(args.subsections)
        metas.append(m)
        subs_by_id = {s.subsection_id: s for s in subs}
    gmeta, gold = _load_pairs_file(args.gold, subs_by_id)
    if gmeta:
        metas.append(gmeta)
    if args.predictions:
        pmeta, rows = read_csv(args.predictions, ["id_a", "id_b", "label"])
        if pmeta:
            metas.append(pmeta)
        pred = {}
        for r in rows:
            key = tuple(sorted((r["id_a"], r["id_b"])))
            pred[key] = _label(r["label"], args.predictions)
        missing = [p for p in gold if tuple(sorted((p.id_a, p.id_b))) not in pred]
        if missing:
            raise ValueError(f"{args.predictions}: no prediction for pair ({missing[0].id_a}, {missing[0].id_b})")
        y_pred = [pred[tuple(sorted((p.id_a, p.id_b)))] for p in gold]
    elif args.model:
        mmeta, model = _load_model(args.model)
        metas.append(mmeta)
        X, _ = labeled_pair_features(gold, model.params_used, args.jobs)
        y_pred = list(model.predict_labels(X))
    else:
        raise UsageError("eval: give --model or --predictions")
    rep = evaluate([p.label for p in gold], y_pred)
    sections = merge_sections(metas, args.allow_mixed)
    out = _out_dir(args.out)
    emeta = make_meta("evaluation", sections, cfg.seed)
    write_json(out / "eval.json", {"meta": emeta, "report": rep.to_dict()})
    (out / "eval.csv").write_text(eval_csv(rep, emeta), encoding="utf-8")
    _print(eval_text(rep))
    return 0


def cmd_classify(args, cfg: RunConfig) -> int:
    from billsim.align import AlignmentBatch

    mmeta, model = _load_model(args.model)
    meta, subs = _load_subsections(args.subsections)
    pmeta, rows = read_csv(args.pairs, ["id_a", "id_b"])
    metas = [mmeta, meta] + ([pmeta] if pmeta else [])
    sections = merge_sections(metas, args.allow_mixed)
    batch = AlignmentBatch({s.subsection_id: s.tokens for s in subs}, model.params_used)
    pairs = [(r["id_a"], r["id_b"]) for r in rows]
    for a, b in pairs:
        for k in (a, b):
            if k not in batch:
                raise ValueError(f"{args.pairs}: unknown subsection id {k!r}")
    results = batch.run(pairs, args.jobs)
    X = np.vstack([f for _, f in results]) if results else np.zeros((0, 4))
    probs = model.predict_proba(X) if len(X) else np.zeros((0, 5))
    out_rows = [(a, b, int(p.argmax()), *map(float, p)) for (a, b), p in zip(pairs, probs)]
    write_csv(args.out, make_meta("predictions", sections), ["id_a", "id_b", "label", "p0", "p1", "p2", "p3", "p4"], out_rows)
    return 0


def _sections_of(subs):
    groups: dict[str, list] = {}
    for s in subs:
        groups.setdefault(s.section_id, []).append(s)
    return groups


def cmd_sections(args, cfg: RunConfig) -> int:
    from billsim.aggregate import SectionCategory, category_from_hand_code, map_section_labels
    from billsim.metrics import evaluate
    from billsim.pipeline import SubsectionLabeler, token_pair_features
    from billsim.report import eval_csv, eval_text

    mmeta, model = _load_model(args.model)
    meta, subs = _load_subsections(args.subsections)
    pmeta, rows = read_csv(args.pairs, ["section_a", "section_b", "code"])
    sections = merge_sections([mmeta, meta] + ([pmeta] if pmeta else []), args.allow_mixed)
    sections.update(cfg.section_hashes("aggregate"))
    groups = _sections_of(subs)
    limit = int(cfg.aggregate["outlier_max_words"])
    kept, discarded, outliers = [], 0, 0
    for r in rows:
        for key in ("section_a", "section_b"):
            if r[key] not in groups:
                raise ValueError(f"{args.pairs}: unknown section id {r[key]!r}")
        try:
            gold = category_from_hand_code(int(r["code"]))
        except ValueError as exc:
            raise ValueError(f"{args.pairs}: {exc}") from None
        if gold is None:
            discarded += 1
            continue
        a, b = groups[r["section_a"]], groups[r["section_b"]]
        ta = [t for s in a for t in s.tokens]
        tb = [t for s in b for t in s.tokens]
        if not args.aggregate and (len(ta) > limit or len(tb) > limit):
            outliers += 1
            continue
        kept.append((r["section_a"], r["section_b"], gold, a, b, ta, tb))
    if args.aggregate:
        labeler = SubsectionLabeler(model, subs, args.jobs)
        labels = []
        for _, _, _, a, b, _, _ in kept:
            m = labeler.label_pairs([(s.subsection_id, t.subsection_id) for s in a for t in b])
            labels.append(int(m.max()) if len(m) else 0)
    else:
        X = token_pair_features([(k[5], k[6]) for k in kept], model.params_used, args.jobs)
        labels = [int(v) for v in model.predict_labels(X)] if len(X) else []
    pred = [map_section_labels(v) for v in labels]
    out = _out_dir(args.out)
    smeta = make_meta("section_predictions", sections)
    write_csv(out / "sections.csv", smeta, ["section_a", "section_b", "gold", "pred", "subsection_label"], [(k[0], k[1], int(k[2]), int(p), v) for k, p, v in zip(kept, pred, labels)])
    summary = f"{len(kept)} section pairs scored, {discarded} discarded (boilerplate/junk), {outliers} length outliers excluded\n\n"
    if kept:
        rep = evaluate([int(k[2]) for k in kept], [int(p) for p in pred], n_classes=len(SectionCategory))
        emeta = make_meta("evaluation", sections)
        write_json(out / "eval.json", {"meta": emeta, "report": rep.to_dict(), "discarded": discarded, "outliers": outliers})
        (out / "eval.csv").write_text(eval_csv(rep, emeta), encoding="utf-8")
        summary += eval_text(rep)
    _print(summary)
    return 0


def cmd_billsim(args, cfg: RunConfig) -> int:
    from billsim.aggregate import bin_summary, cooccurrence_bins
    from billsim.pipeline import SubsectionLabeler
    from billsim.report import summary_csv, summary_text

    mmeta, model = _load_model(args.model)
    meta, subs = _load_subsections(args.subsections)
    by_bill: dict[str, list] = {}
    for s in subs:
        by_bill.setdefault(s.bill_id, []).append(s)
    agg = cfg.aggregate
    metas = [mmeta, meta]
    if args.cooccurrence:
        cmeta, rows = read_csv(args.cooccurrence, ["bill_i", "bill_j", "count"])
        try:
            recs = [(r["bill_i"], r["bill_j"], int(r["count"])) for r in rows]
        except ValueError:
            raise ValueError(f"{args.cooccurrence}: counts must be integers") from None
        counts = {b: len(v) for b, v in by_bill.items()}
        binned = cooccurrence_bins(recs, counts, int(agg["min_subsections"]), int(agg["per_bin_cap"]), cfg.seed)
        todo = [(r.bill_i, r.bill_j, r.bin) for r in binned]
        extra = dict(cfg.section_hashes("aggregate", "seed"), cooccurrence=file_hash(args.cooccurrence))
    elif args.bill_pairs:
        cmeta, rows = read_csv(args.bill_pairs, ["bill_i", "bill_j"])
        todo = [(r["bill_i"], r["bill_j"], "") for r in rows]
        extra = {}
    else:
        raise UsageError("billsim: give --cooccurrence or --bill-pairs")
    if cmeta:
        metas.append(cmeta)
    sections = dict(merge_sections(metas, args.allow_mixed), **extra)
    labeler = SubsectionLabeler(model, subs, args.jobs)
    out_rows = []
    for bi, bj, name in todo:
        for b in (bi, bj):
            if b not in by_bill:
                raise ValueError(f"bill {b!r} has no subsections in {args.subsections}")
        sim = labeler.bill_similarity(bi, by_bill[bi], bj, by_bill[bj])
        out_rows.append((bi, bj, sim.sigma_star_ij, sim.sigma_star_ji, sim.score, name))
    out = _out_dir(args.out)
    bmeta = make_meta("bill_similarity", sections, cfg.seed)
    write_csv(out / "billsim.csv", bmeta, ["bill_i", "bill_j", "sigma_star_ij", "sigma_star_ji", "score", "bin"], out_rows)
    if args.cooccurrence:
        summary = bin_summary((r[5], r[4]) for r in out_rows)
        (out / "bin_summary.csv").write_text(summary_csv(summary, make_meta("bin_summary", sections, cfg.seed)), encoding="utf-8")
        _print(summary_text(summary))
    else:
        _print(f"{len(out_rows)} bill pairs scored\n")
    return 0


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config value, e.g. alignment.match=3")
    common.add_argument("--seed", type=int, help="global seed (overrides the config)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for alignment batches")
    common.add_argument("--allow-mixed", action="store_true", help="accept inputs built from different config sections")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="billsim", description="Subsection- and bill-level similarity for legislative text.")
    p.add_argument("--version", action="version", version=f"billsim {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("ingest", parents=[common], help="parse a corpus directory into filtered subsections")
    s.add_argument("--corpus")
    s.add_argument("--out", help="output directory")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("ngrams", parents=[common], help="most frequent n-grams")
    s.add_argument("--subsections", required=True)
    s.add_argument("--n-min", type=int, default=3)
    s.add_argument("--n-max", type=int, default=10)
    s.add_argument("--top", type=int, default=20)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ngrams)

    s = sub.add_parser("sample", parents=[common], help="candidate pairs from a cosine band")
    s.add_argument("--subsections", required=True)
    s.add_argument("--embeddings", help="TSV of external vectors (default: internal TF-IDF)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("synth", parents=[common], help="generate synthetic pairs per class")
    s.add_argument("--subsections", required=True)
    s.add_argument("--n-per-class", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("align", parents=[common], help="alignment scores and features for a pair list")
    s.add_argument("--subsections", required=True)
    s.add_argument("--pairs", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_align)

    for name, func, hlp in (("train", cmd_train, "fit the pair classifier"), ("grid", cmd_grid, "hyperparameter grid on a 7:1:2 split")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--synthetic", help="synthetic pairs JSONL")
        s.add_argument("--human", help="human-labelled pairs (JSONL with texts, or CSV with --subsections)")
        s.add_argument("--subsections")
        s.add_argument("--C", type=float)
        s.add_argument("--norm", choices=["l2", "none"])
        s.add_argument("--out", required=True)
        s.set_defaults(func=func)
        if name == "train":
            s.add_argument("--two-stage", dest="two_stage", action="store_true", default=None)
            s.add_argument("--single-stage", dest="two_stage", action="store_false")
        else:
            s.add_argument("--grid-C", dest="Cs", type=float, nargs="+")
            s.add_argument("--grid-norm", dest="norms", choices=["l2", "none"], nargs="+")

    s = sub.add_parser("eval", parents=[common], help="evaluate a model or external predictions")
    s.add_argument("--gold", required=True)
    s.add_argument("--model")
    s.add_argument("--predictions", help="CSV id_a,id_b,label[,p0..p4]")
    s.add_argument("--subsections")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("classify", parents=[common], help="label subsection pairs with a model")
    s.add_argument("--model", required=True)
    s.add_argument("--subsections", required=True)
    s.add_argument("--pairs", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("sections", parents=[common], help="section-level categories against hand codes")
    s.add_argument("--model", required=True)
    s.add_argument("--subsections", required=True)
    s.add_argument("--pairs", required=True, help="CSV section_a,section_b,code")
    s.add_argument("--aggregate", action="store_true", help="label via subsection pairs instead of whole sections")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sections)

    s = sub.add_parser("billsim", parents=[common], help="bill-level similarity and co-occurrence bins")
    s.add_argument("--model", required=True)
    s.add_argument("--subsections", required=True)
    s.add_argument("--cooccurrence", help="CSV bill_i,bill_j,count")
    s.add_argument("--bill-pairs", help="CSV bill_i,bill_j")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_billsim)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        overrides = list(args.set)
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")
        for flag, key in (("C", "classifier.C"), ("norm", "classifier.norm"), ("two_stage", "classifier.two_stage")):
            if getattr(args, flag, None) is not None:
                overrides.append(f"{key}={getattr(args, flag)}")
        cfg = RunConfig.load(args.config, overrides)
        return args.func(args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ProvenanceError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"billsim: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
