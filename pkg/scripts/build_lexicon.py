"""Build the packaged synonym lexicon from a WordNet 3.0 ``dict`` directory.

Usage::

    python scripts/build_lexicon.py /path/to/wordnet/dict src/billsim/data/synonyms.tsv

Lemmas are ranked by how many of their senses are tagged in WordNet's sense
corpora (a rough usage-frequency signal). Synonyms come from the two most
frequent senses only, so replacements stay close in meaning.
"""
import argparse
import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from billsim.synth import STOPWORDS  # noqa: E402

POS = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}
WORD_RE = re.compile(r"^[a-z]{3,}$")


def read_synsets(dict_dir: Path, pos: str) -> dict[int, list[str]]:
    if pos == "noun" and not (dict_dir / "data.noun").exists():
        paths = sorted(dict_dir.glob("data.noun*"))
    else:
        paths = [dict_dir / f"data.{pos}"]
    synsets = {}
    for path in paths:
        for line in path.read_text(encoding="latin-1").splitlines():
            if not line or line.startswith("  "):
                continue
            fields = line.split()
            offset, w_cnt = int(fields[0]), int(fields[3], 16)
            words = [fields[4 + 2 * k].lower() for k in range(w_cnt)]
            # adjective satellites carry a marker such as "(a)"
            synsets[offset] = [re.sub(r"\(.*\)$", "", w) for w in words]
    return synsets


def read_index(dict_dir: Path, pos: str):
    for line in (dict_dir / f"index.{pos}").read_text(encoding="latin-1").splitlines():
        if not line or line.startswith("  "):
            continue
        fields = line.split()
        lemma, synset_cnt, p_cnt = fields[0], int(fields[2]), int(fields[3])
        tagsense_cnt = int(fields[5 + p_cnt])
        offsets = [int(x) for x in fields[6 + p_cnt : 6 + p_cnt + synset_cnt]]
        yield lemma, tagsense_cnt, offsets


def build(dict_dir: Path, size: int) -> dict[str, list[str]]:
    scored: dict[str, int] = {}
    synonyms: dict[str, list[str]] = {}
    for pos in POS:
        synsets = read_synsets(dict_dir, pos)
        for lemma, tagged, offsets in read_index(dict_dir, pos):
            if not WORD_RE.match(lemma) or lemma in STOPWORDS:
                continue
            found = synonyms.setdefault(lemma, [])
            for off in offsets[:2]:
                for w in synsets.get(off, []):
                    if WORD_RE.match(w) and w != lemma and w not in found and w not in STOPWORDS:
                        found.append(w)
            scored[lemma] = max(scored.get(lemma, 0), tagged)
    ranked = sorted((w for w in synonyms if synonyms[w]), key=lambda w: (-scored[w], w))
    return {w: synonyms[w] for w in sorted(ranked[:size])}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dict_dir", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--size", type=int, default=2000)
    args = ap.parse_args()
    lexicon = build(args.dict_dir, args.size)
    with args.out.open("w", encoding="utf-8") as fh:
        fh.write("# derived from WordNet 3.0, Copyright 2006 by Princeton University; see LICENSE-WordNet.txt\n")
        for word, syns in lexicon.items():
            fh.write(f"{word}\t{','.join(syns)}\n")
    print(f"wrote {len(lexicon)} entries to {args.out}")


if __name__ == "__main__":
    main()
