"""Class-conditioned synthetic subsection pairs.

Given an anchor subsection A, a counterpart X is derived whose relation to A
matches a requested label 0..4: verbatim copy, light swap/synonym noise,
chunk-level rewriting with phrases borrowed from another subsection, or an
unrelated pool member.
"""
from __future__ import annotations

import hashlib
import random
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator, Sequence

from billsim.classify import LabeledPair
from billsim.corpus import Subsection

STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because been before being below
    between both but by can could did do does doing down during each few for from further had has have
    having he her here hers herself him himself his how i if in into is it its itself just me more most
    my myself no nor not now of off on once only or other our ours ourselves out over own same she should
    so some such than that the their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom why will with would you
    your yours yourself yourselves shall may must upon thereof therein hereby such whether
    """.split()
)


class SynonymLexicon:
    """Word -> synonym list, plus the stopwords that are never replaced."""

    def __init__(self, entries: dict[str, Sequence[str]], stopwords: frozenset[str] = STOPWORDS):
        self.stopwords = frozenset(w.lower() for w in stopwords)
        self.entries: dict[str, tuple[str, ...]] = {}
        for word, syns in entries.items():
            w = word.lower()
            clean = tuple(dict.fromkeys(s.lower() for s in syns if s.lower() != w))
            if clean and w not in self.stopwords:
                self.entries[w] = clean

    def __len__(self) -> int:
        return len(self.entries)

    def synonyms(self, word: str) -> tuple[str, ...]:
        return self.entries.get(word.lower(), ())

    @classmethod
    def from_tsv(cls, path: str | Path) -> "SynonymLexicon":
        return cls(_parse_tsv(Path(path).read_text(encoding="utf-8"), str(path)))

    @classmethod
    def default(cls) -> "SynonymLexicon":
        text = resources.files("billsim.data").joinpath("synonyms.tsv").read_text(encoding="utf-8")
        return cls(_parse_tsv(text, "synonyms.tsv"))


def _parse_tsv(text: str, where: str) -> dict[str, list[str]]:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        word, sep, rest = line.partition("\t")
        syns = [s.strip() for s in rest.split(",") if s.strip()]
        if not sep or not word.strip() or not syns:
            raise ValueError(f"{where}:{lineno}: expected 'word<TAB>syn1,syn2,...'")
        entries[word.strip()] = syns
    return entries


@dataclass(frozen=True)
class SynthConfig:
    swap_syn_prop_max: float = 0.10
    swap_syn_op_cap: int = 20
    related_band: tuple[float, float] = (0.20, 0.40)
    partial_band: tuple[float, float] = (0.60, 0.80)
    chunk_words_min: int = 5
    chunk_words_max: int = 15
    seed: int = 0
    synonym_lexicon: str | None = None
    exclude_same_bill: bool = True

    def __post_init__(self):
        for name in ("related_band", "partial_band"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi <= 1:
                raise ValueError(f"{name} must satisfy 0 <= low <= high <= 1, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.chunk_words_min < 1 or self.chunk_words_max < self.chunk_words_min:
            raise ValueError("need 1 <= chunk_words_min <= chunk_words_max")
        if not 0 <= self.swap_syn_prop_max <= 1 or self.swap_syn_op_cap < 0:
            raise ValueError("swap_syn_prop_max must lie in [0, 1] and swap_syn_op_cap >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "swap_syn_prop_max": self.swap_syn_prop_max,
            "swap_syn_op_cap": self.swap_syn_op_cap,
            "related_band": list(self.related_band),
            "partial_band": list(self.partial_band),
            "chunk_words_min": self.chunk_words_min,
            "chunk_words_max": self.chunk_words_max,
            "synonym_lexicon": self.synonym_lexicon,
            "exclude_same_bill": self.exclude_same_bill,
        }

    def load_lexicon(self) -> SynonymLexicon:
        return SynonymLexicon.from_tsv(self.synonym_lexicon) if self.synonym_lexicon else SynonymLexicon.default()


def pair_rng(seed: int, *parts) -> random.Random:
    """Independent stream keyed on the global seed and the pair's identity."""
    h = hashlib.blake2b(digest_size=16)
    h.update(str(seed).encode())
    for p in parts:
        h.update(b"\x1f" + str(p).encode())
    return random.Random(int.from_bytes(h.digest(), "big"))


# -- swap / synonym ---------------------------------------------------------


def _match_case(template: str, word: str) -> str:
    if template.isupper() and len(template) > 1:
        return word.upper()
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def swap_and_synonym(tokens: Sequence[str], n_ops: int, lexicon: SynonymLexicon, rng: random.Random, cap: int = 20, trace: list | None = None) -> list[str]:
    """Apply ``min(n_ops, cap)`` swap-or-synonym operations, each a fair coin flip.

    A synonym draw with nothing replaceable falls back to a swap. Sequences
    shorter than two tokens cannot be swapped, so such operations are no-ops.
    ``trace`` (if given) receives one ``(kind, ...)`` tuple per operation.
    """
    if n_ops < 0:
        raise ValueError("n_ops must be >= 0")
    out = list(tokens)
    for _ in range(min(n_ops, cap)):
        kind = "synonym" if rng.random() < 0.5 else "swap"
        if kind == "synonym":
            targets = [k for k, t in enumerate(out) if t.lower() not in lexicon.stopwords and lexicon.synonyms(t)]
            if targets:
                k = rng.choice(targets)
                new = _match_case(out[k], rng.choice(lexicon.synonyms(out[k])))
                if trace is not None:
                    trace.append(("synonym", k, out[k], new))
                out[k] = new
                continue
        if len(out) < 2:
            if trace is not None:
                trace.append(("noop",))
            continue
        i, j = rng.sample(range(len(out)), 2)
        out[i], out[j] = out[j], out[i]
        if trace is not None:
            trace.append(("swap", i, j))
    return out


def _light_noise(tokens: Sequence[str], lexicon: SynonymLexicon, rng: random.Random, config: SynthConfig) -> list[str]:
    n_ops = rng.randint(0, int(config.swap_syn_prop_max * len(tokens)))
    return swap_and_synonym(tokens, n_ops, lexicon, rng, config.swap_syn_op_cap)


# -- chunk edit ------------------------------------------------------------


def _carve(n: int, lengths: list[int], rng: random.Random) -> list[tuple[int, int]]:
    """Place spans of the requested lengths at random in ``range(n)``.

    Spans never overlap or touch, so at least one surviving token separates
    any two of them. A span that no longer fits is shortened, then dropped.
    """
    used = [False] * n
    spans = []
    for want in lengths:
        for length in range(want, 0, -1):
            starts = [
                s
                for s in range(n - length + 1)
                if not any(used[max(0, s - 1) : s + length + 1])
            ]
            if starts:
                s = rng.choice(starts)
                used[s : s + length] = [True] * length
                spans.append((s, s + length))
                break
    return spans


def _chunk_lengths(total: int, rng: random.Random, config: SynthConfig) -> list[int]:
    out = []
    while total > 0:
        k = min(rng.randint(config.chunk_words_min, config.chunk_words_max), total)
        out.append(k)
        total -= k
    return out


def chunk_segments(tokens_a: Sequence[str], tokens_b: Sequence[str], modification_prop: float, rng: random.Random, config: SynthConfig, delete_fraction: float | None = None) -> list[tuple[str, list[str]]]:
    """Chunk edit returning labelled segments ``("A" | "B", tokens)`` in output order.

    The modification budget ``round(prop * |A|)`` is split uniformly at random
    into a delete share and an insert share. Deleted chunks are cut from A;
    each insert chunk is a contiguous run of B that takes the place of an
    equally long chunk of A, so every unit of modification removes a word of
    A. Surviving A runs keep their internal order and are shuffled; B chunks
    go into distinct random gaps between them.
    """
    if not 0 <= modification_prop <= 1:
        raise ValueError("modification_prop must lie in [0, 1]")
    if not tokens_a:
        raise ValueError("tokens_a must be nonempty")
    n = len(tokens_a)
    budget = round(modification_prop * n)
    if budget == 0:
        return [("A", list(tokens_a))]
    share = rng.uniform(0.0, 1.0) if delete_fraction is None else delete_fraction
    n_del = round(share * budget)
    del_lengths = _chunk_lengths(n_del, rng, config)
    ins_lengths = _chunk_lengths(budget - n_del, rng, config) if tokens_b else []
    spans = _carve(n, del_lengths + ins_lengths, rng)
    inserted = []
    for s, e in spans[len(del_lengths) :]:
        length = min(e - s, len(tokens_b))
        start = rng.randint(0, len(tokens_b) - length)
        inserted.append(list(tokens_b[start : start + length]))

    remnants, prev = [], 0
    for s, e in sorted(spans):
        if s > prev:
            remnants.append(list(tokens_a[prev:s]))
        prev = e
    if prev < n:
        remnants.append(list(tokens_a[prev:]))
    rng.shuffle(remnants)
    slots = sorted(rng.sample(range(len(remnants) + 1), min(len(inserted), len(remnants) + 1)))
    segments: list[tuple[str, list[str]]] = []
    it = iter(inserted)
    for gap in range(len(remnants) + 1):
        if gap in slots:
            segments.append(("B", next(it)))
        if gap < len(remnants):
            segments.append(("A", remnants[gap]))
    return segments


def chunk_edit(tokens_a: Sequence[str], tokens_b: Sequence[str], modification_prop: float, rng: random.Random, config: SynthConfig | None = None, delete_fraction: float | None = None) -> list[str]:
    segs = chunk_segments(tokens_a, tokens_b, modification_prop, rng, config or SynthConfig(), delete_fraction)
    return [t for _, toks in segs for t in toks]


# -- pair generation -------------------------------------------------------


def _other(pool: Sequence[Subsection], a: Subsection, rng: random.Random, other_bill: bool) -> Subsection:
    cands = [s for s in pool if s.subsection_id != a.subsection_id and (not other_bill or s.bill_id != a.bill_id)]
    if not cands:
        what = "from another bill" if other_bill else "other than the anchor"
        raise ValueError(f"pool has no subsection {what} for anchor {a.subsection_id}")
    return rng.choice(cands)


def generate_pair(a: Subsection, label: int, pool: Sequence[Subsection], config: SynthConfig, rng: random.Random, lexicon: SynonymLexicon, index: int = 0) -> LabeledPair:
    if label not in range(5):
        raise ValueError(f"class label must be in 0..4, got {label!r}")
    if not a.tokens:
        raise ValueError(f"anchor {a.subsection_id} has no tokens")
    if label == 4:
        x_id, x_tokens = a.subsection_id, list(a.tokens)
    elif label == 3:
        x_id, x_tokens = f"{a.subsection_id}~3.{index}", _light_noise(a.tokens, lexicon, rng, config)
    elif label in (1, 2):
        lo, hi = config.related_band if label == 2 else config.partial_band
        b = _other(pool, a, rng, other_bill=False)
        edited = chunk_edit(a.tokens, b.tokens, rng.uniform(lo, hi), rng, config)
        x_id, x_tokens = f"{a.subsection_id}~{label}.{index}", _light_noise(edited, lexicon, rng, config)
    else:
        x = _other(pool, a, rng, other_bill=config.exclude_same_bill)
        x_id, x_tokens = x.subsection_id, _light_noise(x.tokens, lexicon, rng, config)
    return LabeledPair(a.subsection_id, x_id, label, "synthetic", a.text, " ".join(x_tokens))


def anchor_index(seed: int, label: int, k: int, n: int) -> int:
    h = hashlib.blake2b(f"{seed}\x1fanchor\x1f{label}\x1f{k}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big") % n


def generate_dataset(pool: Sequence[Subsection], n_per_class: int, config: SynthConfig, lexicon: SynonymLexicon | None = None, classes: Sequence[int] = (4, 3, 2, 1, 0)) -> Iterator[LabeledPair]:
    """Yield exactly ``n_per_class`` pairs for each class, deterministically.

    Anchors and per-pair random streams depend only on (seed, class, index)
    and the pool order, never on generation order.
    """
    if not pool:
        raise ValueError("subsection pool is empty")
    lexicon = lexicon or config.load_lexicon()
    for label in classes:
        for k in range(n_per_class):
            a = pool[anchor_index(config.seed, label, k, len(pool))]
            rng = pair_rng(config.seed, a.subsection_id, label, k)
            yield generate_pair(a, label, pool, config, rng, lexicon, k)


def pair_record(pair: LabeledPair, seed: int) -> dict:
    return {
        "id_a": pair.id_a,
        "id_x": pair.id_b,
        "text_a": pair.text_a,
        "text_x": pair.text_b,
        "label": pair.label,
        "provenance": pair.provenance,
        "seed": seed,
    }


def pair_from_record(rec: dict) -> LabeledPair:
    for key in ("id_a", "text_a", "text_x", "label"):
        if key not in rec:
            raise ValueError(f"synthetic pair record missing field {key!r}")
    return LabeledPair(rec["id_a"], rec.get("id_x", rec["id_a"]), int(rec["label"]), rec.get("provenance", "synthetic"), rec["text_a"], rec["text_x"])


def multiset_overlap(a: Sequence[str], x: Sequence[str]) -> float:
    """|A ∩ X| / |A| with multiset intersection over lowercased tokens."""
    if not a:
        return 0.0
    ca, cx = Counter(t.lower() for t in a), Counter(t.lower() for t in x)
    return sum((ca & cx).values()) / len(a)
