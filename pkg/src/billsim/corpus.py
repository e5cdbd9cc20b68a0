"""Split plain-text bills into subsections and prepare the analysis corpus.

The parser targets the GPO plain-text layout used by congressional bill
text: ``SEC. n.`` headers open sections, paragraph-first lines are indented
by nesting depth, wrapped continuation lines start at column 0, and quoted
material (text inserted into another law) opens with a doubled backquote and
closes with a doubled apostrophe.
"""
from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

log = logging.getLogger(__name__)

BOILERPLATE_HEADINGS = frozenset(
    {
        "effective date",
        "authorization of appropriations",
        "vacancies",
        "termination",
        "table of contents",
        "short title",
        "reference",
        "sunset",
        "appropriation",
        "severability",
        "matching requirement",
        "definitions",
    }
)

_TOKEN_RE = re.compile(r"[^\W_]+")
_SECTION_RE = re.compile(r"^\s*(?:SECTION|SEC\.)\s+([0-9A-Za-z][0-9A-Za-z-]*)\.(?:\s+(.*))?$")
_DIVISION_RE = re.compile(
    r"^\s*(?:TITLE|SUBTITLE|Subtitle|PART|Part|SUBPART|Subpart|CHAPTER|Chapter|DIVISION)"
    r"\s+[0-9A-Za-z][0-9A-Za-z-]*\s*--"
)
_MARKER_RE = re.compile(r"^(\s*)\(([a-z]|\d+)\)(?=\s|$)")
_INLINE_HEADING_RE = re.compile(r"^\((?:[A-Za-z]+|\d+)\)\s+(.{1,120}?)\.--")
_MULTISPACE_RE = re.compile(r"\S\s{2,}(?=\S)")
_DOT_LEADER_RE = re.compile(r"\.{4,}|(?:\. ){3,}")
_CHAMBER_RE = re.compile(r"(?<![a-z])(hr|hres|hjres|hconres|s|sres|sjres|sconres)(?=[-_]?\d)")


def tokenize(text: str) -> list[str]:
    """Word tokens: maximal runs of alphanumeric characters (case preserved)."""
    return _TOKEN_RE.findall(text)


def normalize_heading(heading: str | None) -> str:
    if not heading:
        return ""
    h = heading.replace("``", " ").replace("''", " ")
    h = " ".join(h.split()).lower()
    return h.rstrip(" .:;,-").strip()


class Chamber(str, Enum):
    HOUSE = "House"
    SENATE = "Senate"


def chamber_from_id(bill_id: str) -> Chamber | None:
    m = _CHAMBER_RE.search(bill_id.lower())
    if m is None:
        return None
    return Chamber.HOUSE if m.group(1).startswith("h") else Chamber.SENATE


@dataclass(frozen=True)
class Subsection:
    subsection_id: str
    bill_id: str
    text: str
    tokens: tuple[str, ...]
    heading: str | None = None
    section_heading: str | None = None
    is_quoted_block: bool = False

    @property
    def word_count(self) -> int:
        return len(self.tokens)

    @property
    def section_id(self) -> str:
        return self.subsection_id.split("#", 1)[0].rsplit(".", 1)[0]

    @classmethod
    def from_text(cls, subsection_id: str, bill_id: str, text: str, **kw) -> "Subsection":
        return cls(subsection_id, bill_id, text, tuple(tokenize(text)), **kw)

    def to_record(self) -> dict:
        return {
            "subsection_id": self.subsection_id,
            "bill_id": self.bill_id,
            "heading": self.heading,
            "section_heading": self.section_heading,
            "text": self.text,
            "word_count": self.word_count,
            "is_quoted_block": self.is_quoted_block,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Subsection":
        for key in ("subsection_id", "bill_id", "text"):
            if key not in rec:
                raise ValueError(f"subsection record missing field {key!r}")
        sub = cls.from_text(
            rec["subsection_id"],
            rec["bill_id"],
            rec["text"],
            heading=rec.get("heading"),
            section_heading=rec.get("section_heading"),
            is_quoted_block=bool(rec.get("is_quoted_block", False)),
        )
        if "word_count" in rec and rec["word_count"] != sub.word_count:
            raise ValueError(f"{sub.subsection_id}: word_count {rec['word_count']} does not match text")
        return sub


@dataclass
class Bill:
    bill_id: str
    raw_text: str
    subsections: list[Subsection] = field(default_factory=list)
    chamber: Chamber | None = None
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CorpusFilterConfig:
    boilerplate_headings: frozenset[str] = BOILERPLATE_HEADINGS
    min_words_exclusive: int = 30
    slice_max_words: int = 400

    def __post_init__(self):
        if self.min_words_exclusive < 0:
            raise ValueError("min_words_exclusive must be >= 0")
        if self.slice_max_words <= self.min_words_exclusive:
            raise ValueError("slice_max_words must exceed min_words_exclusive")
        object.__setattr__(
            self, "boilerplate_headings", frozenset(normalize_heading(h) for h in self.boilerplate_headings)
        )


# -- parsing ---------------------------------------------------------------


def _is_table_line(line: str) -> bool:
    s = line.strip()
    return len(_MULTISPACE_RE.findall(s)) >= 3 or bool(_DOT_LEADER_RE.search(s))


def _blank_tables(lines: list[str]) -> list[str]:
    """Blank out blank-line-delimited blocks where at least half the lines look tabular."""
    out = list(lines)
    start = 0
    n = len(lines)
    while start < n:
        if not lines[start].strip():
            start += 1
            continue
        end = start
        while end < n and lines[end].strip():
            end += 1
        block = lines[start:end]
        if 2 * sum(_is_table_line(l) for l in block) >= len(block):
            for k in range(start, end):
                out[k] = ""
        start = end
    return out


def _indent(line: str) -> int:
    return len(line) - len(line.lstrip())


@dataclass
class _Section:
    heading: str | None
    lines: list[str]


def _split_sections(lines: list[str]) -> list[_Section]:
    if not any(_SECTION_RE.match(l) for l in lines):
        return [_Section(None, lines)]
    sections: list[_Section] = []
    current: _Section | None = None
    i, n = 0, len(lines)
    while i < n:
        line = lines[i]
        m = _SECTION_RE.match(line)
        if m:
            rest = (m.group(2) or "").strip()
            body_first = None
            if any(c.islower() for c in rest) and ". " in rest:
                rest, body_first = rest.split(". ", 1)
            heading_parts = [rest]
            i += 1
            # wrapped all-caps heading lines
            while i < n and lines[i].strip() and not any(c.islower() for c in lines[i]) and not lines[i].lstrip().startswith(("(", "``")) and not _SECTION_RE.match(lines[i]):
                heading_parts.append(lines[i].strip())
                i += 1
            heading = " ".join(p for p in heading_parts if p).rstrip(".").strip() or None
            current = _Section(heading, [body_first] if body_first else [])
            sections.append(current)
            continue
        if _DIVISION_RE.match(line):
            current = None
        elif current is not None:
            current.lines.append(line)
        i += 1
    return sections


def _marker_candidates(lines: list[str], quoted: set[int], indented: bool) -> list[tuple[int, int, str]]:
    found = []
    for idx, line in enumerate(lines):
        if idx in quoted:
            continue
        m = _MARKER_RE.match(line)
        if m is None:
            continue
        depth = len(m.group(1))
        if indented and depth == 0:
            # column-0 lines are wrapped continuations in indented layouts
            continue
        found.append((idx, depth, m.group(2)))
    return found


def _quoted_ranges(lines: list[str], indented: bool, warnings: list[str], where: str) -> list[tuple[int, int]]:
    """Half-open line ranges of quoted blocks."""
    ranges = []
    i, n = 0, len(lines)

    def opens(line: str) -> bool:
        # in indented layouts a column-0 line is a wrapped continuation
        return line.lstrip().startswith("``") and not (indented and _indent(line) == 0)

    while i < n:
        if not opens(lines[i]):
            i += 1
            continue
        start, depth, j, closed = i, 0, i, False
        while j < n:
            t = lines[j].lstrip()
            if j > start and not t.startswith("``") and t and _MARKER_RE.match(lines[j]) and not (indented and _indent(lines[j]) == 0):
                break
            if opens(lines[j]):
                depth = 1
                t = t[2:]
            depth += t.count("``") - t.count("''")
            j += 1
            if depth <= 0:
                closed = True
                break
        if not closed:
            warnings.append(f"{where}: unterminated quoted block at line {start + 1}; closed at line {j}")
        ranges.append((start, j))
        i = j
    return ranges


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _check_sequence(labels: list[str], warnings: list[str], where: str) -> None:
    prev = None
    for lab in labels:
        if prev is not None:
            ok = (
                (lab.isdigit() and prev.isdigit() and int(lab) == int(prev) + 1)
                or (len(lab) == 1 and len(prev) == 1 and lab.isalpha() and prev.isalpha() and _LETTERS.index(lab) == _LETTERS.index(prev) + 1)
            )
            if not ok:
                warnings.append(f"{where}: enumerator ({lab}) does not follow ({prev})")
        prev = lab


def _inline_heading(line: str) -> str | None:
    s = line.strip()
    if s.startswith("``"):
        s = s[2:]
    m = _INLINE_HEADING_RE.match(s)
    return m.group(1).strip() if m else None


def _section_pieces(section: _Section, indented: bool, warnings: list[str], where: str):
    """Yield (lines, heading, is_quoted) pieces of one section in document order."""
    lines = section.lines
    ranges = _quoted_ranges(lines, indented, warnings, where)
    quoted_start = {a: b for a, b in ranges}
    quoted = {k for a, b in ranges for k in range(a, b)}
    cands = _marker_candidates(lines, quoted, indented)
    split_at: dict[int, str] = {}
    if cands:
        top = min(d for _, d, _ in cands)
        first_kind = next(lab.isdigit() for _, d, lab in cands if d == top)
        for idx, d, lab in cands:
            if d == top and lab.isdigit() == first_kind:
                split_at[idx] = lab
        _check_sequence(list(split_at.values()), warnings, where)

    cur: list[str] = []
    cur_heading = section.heading if not split_at else None
    i, n = 0, len(lines)
    while i < n:
        if i in quoted_start:
            if cur:
                yield cur, cur_heading, False
                cur = []
            end = quoted_start[i]
            yield lines[i:end], _inline_heading(lines[i]), True
            i = end
            continue
        if i in split_at:
            if cur:
                yield cur, cur_heading, False
            cur = [lines[i]]
            cur_heading = _inline_heading(lines[i])
        else:
            cur.append(lines[i])
        i += 1
    if cur:
        yield cur, cur_heading, False


def parse_bill(raw_text: str, bill_id: str, chamber: Chamber | None = None) -> Bill:
    """Parse plain bill text into subsections.

    Text before the first section header (title page, enacting clause) and
    between a TITLE/Subtitle divider and the next section is not retained.
    A document with no section headers is treated as a single section.
    Structural problems are recorded in ``Bill.warnings``; parsing never fails.
    """
    if not bill_id:
        raise ValueError("bill_id must be nonempty")
    bill = Bill(bill_id, raw_text, chamber=chamber or chamber_from_id(bill_id))
    lines = _blank_tables(raw_text.splitlines())
    indented = any(_MARKER_RE.match(l) and _indent(l) > 0 for l in lines)
    for sec_idx, section in enumerate(_split_sections(lines)):
        where = f"{bill_id} section {sec_idx}"
        piece_idx = 0
        for piece_lines, heading, is_quoted in _section_pieces(section, indented, bill.warnings, where):
            text = "\n".join(piece_lines).strip("\n")
            sub = Subsection.from_text(
                f"{bill_id}/s{sec_idx}.{piece_idx}",
                bill_id,
                text,
                heading=heading,
                section_heading=section.heading,
                is_quoted_block=is_quoted,
            )
            if sub.tokens:
                bill.subsections.append(sub)
                piece_idx += 1
    for w in bill.warnings:
        log.warning(w)
    return bill


def read_bill_file(path: str | Path) -> Bill:
    path = Path(path)
    return parse_bill(path.read_text(encoding="utf-8"), path.stem)


def iter_corpus_dir(corpus_dir: str | Path) -> Iterator[Bill]:
    """Parse every bill file in a directory (one bill per file, name = bill id), sorted by name."""
    paths = sorted(p for p in Path(corpus_dir).iterdir() if p.is_file() and not p.name.startswith("."))
    seen = set()
    for p in paths:
        if p.stem in seen:
            raise ValueError(f"duplicate bill id {p.stem!r} in {corpus_dir}")
        seen.add(p.stem)
        yield read_bill_file(p)


# -- filtering -------------------------------------------------------------


def is_boilerplate(sub: Subsection, config: CorpusFilterConfig) -> bool:
    if not config.boilerplate_headings:
        return False
    return (
        normalize_heading(sub.heading) in config.boilerplate_headings
        or normalize_heading(sub.section_heading) in config.boilerplate_headings
    )


def filter_boilerplate(subsections: Iterable[Subsection], config: CorpusFilterConfig) -> list[Subsection]:
    """Drop subsections whose own or enclosing section heading is a boilerplate heading."""
    return [s for s in subsections if not is_boilerplate(s, config)]


def normalize_and_slice(subsection: Subsection, config: CorpusFilterConfig) -> list[Subsection]:
    n = subsection.word_count
    if n <= config.min_words_exclusive:
        return []
    if n <= config.slice_max_words:
        return [subsection]
    size = config.slice_max_words
    out = []
    for k in range(math.ceil(n / size)):
        chunk = subsection.tokens[k * size : (k + 1) * size]
        out.append(replace(subsection, subsection_id=f"{subsection.subsection_id}#{k}", text=" ".join(chunk), tokens=chunk))
    return out


@dataclass
class CorpusStats:
    bills: int = 0
    subsections: int = 0
    boilerplate_removed: int = 0
    short_removed: int = 0
    final_subsections: int = 0
    total_words: int = 0
    warnings: int = 0

    @property
    def mean_words(self) -> float:
        return self.total_words / self.final_subsections if self.final_subsections else 0.0

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(*(getattr(self, f) + getattr(other, f) for f in self.__dataclass_fields__))

    def to_dict(self) -> dict:
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d["mean_words"] = round(self.mean_words, 6)
        return d


def prepare_bill(bill: Bill, config: CorpusFilterConfig) -> tuple[list[Subsection], CorpusStats]:
    """Boilerplate filter, then length exclusion and slicing, for one bill."""
    kept = filter_boilerplate(bill.subsections, config)
    final: list[Subsection] = []
    short = 0
    for sub in kept:
        pieces = normalize_and_slice(sub, config)
        short += not pieces
        final.extend(pieces)
    stats = CorpusStats(
        bills=1,
        subsections=len(bill.subsections),
        boilerplate_removed=len(bill.subsections) - len(kept),
        short_removed=short,
        final_subsections=len(final),
        total_words=sum(s.word_count for s in final),
        warnings=len(bill.warnings),
    )
    return final, stats


def prepare_corpus(bills: Iterable[Bill], config: CorpusFilterConfig) -> tuple[list[Subsection], CorpusStats]:
    subs: list[Subsection] = []
    total = CorpusStats()
    for bill in bills:
        final, stats = prepare_bill(bill, config)
        subs.extend(final)
        total = total.merge(stats)
    return subs, total


# -- n-gram statistics -----------------------------------------------------


def count_ngrams(subsections: Iterable[Subsection], n: int) -> Counter:
    counts: Counter = Counter()
    for sub in subsections:
        toks = [t.lower() for t in sub.tokens]
        counts.update(" ".join(toks[i : i + n]) for i in range(len(toks) - n + 1))
    return counts


def top_common_ngrams(corpus: Sequence[Subsection], n_min: int, n_max: int, k: int) -> list[tuple[str, int]]:
    """The ``k`` most frequent lowercase word n-grams for each n in ``[n_min, n_max]``.

    N-grams never cross subsection boundaries. Ties are broken
    lexicographically. Results are grouped by increasing n.
    """
    if not 1 <= n_min <= n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    if k < 1:
        raise ValueError("k must be >= 1")
    out: list[tuple[str, int]] = []
    for n in range(n_min, n_max + 1):
        counts = count_ngrams(corpus, n)
        out.extend(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k])
    return out
