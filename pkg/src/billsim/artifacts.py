"""Machine-readable artifacts with provenance headers.

Every file written by the tool starts with a metadata block naming the tool
version, the artifact kind, and a hash per configuration section that shaped
its content. Readers merge and compare these blocks so that artifacts built
under different settings are not silently combined.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from billsim import __version__

TOOL = "billsim"
CSV_PREFIX = "# meta "


class ProvenanceError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def section_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def file_hash(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()[:16]


def make_meta(kind: str, sections: dict[str, str], seed: int | None = None) -> dict:
    sections = dict(sorted(sections.items()))
    return {
        "tool": TOOL,
        "version": __version__,
        "kind": kind,
        "seed": seed,
        "config_hash": section_hash(sections),
        "sections": sections,
    }


def merge_sections(metas: Sequence[dict], allow_mixed: bool = False) -> dict[str, str]:
    """Union of the inputs' section hashes; a section seen twice must agree."""
    out: dict[str, str] = {}
    origin: dict[str, str] = {}
    for meta in metas:
        for name, h in meta.get("sections", {}).items():
            if name in out and out[name] != h and not allow_mixed:
                raise ProvenanceError(
                    f"inputs disagree on config section {name!r}: {origin[name]} has {out[name]}, {meta.get('kind')} has {h}"
                )
            if name not in out:
                out[name] = h
                origin[name] = str(meta.get("kind"))
    return out


def check_meta(meta: dict | None, where: str, kinds: Iterable[str] | None = None) -> dict:
    if meta is None:
        raise ProvenanceError(f"{where}: missing {TOOL} metadata header")
    if meta.get("tool") != TOOL:
        raise ProvenanceError(f"{where}: not written by {TOOL}")
    for key in ("version", "kind", "config_hash", "sections"):
        if key not in meta:
            raise ProvenanceError(f"{where}: metadata header lacks {key!r}")
    if meta["version"] != __version__:
        raise ProvenanceError(f"{where}: written by {TOOL} {meta['version']}, this is {__version__}")
    kinds = tuple(kinds or ())
    if kinds and meta["kind"] not in kinds:
        raise ProvenanceError(f"{where}: expected a {' or '.join(kinds)} artifact, got {meta['kind']!r}")
    return meta


# -- JSONL -----------------------------------------------------------------


def write_jsonl(path: str | Path, meta: dict, records: Iterable[dict]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json({"_meta": meta}) + "\n")
        for rec in records:
            fh.write(canonical_json(rec) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path, kinds: Iterable[str] | None = None, require_meta: bool = True) -> tuple[dict | None, Iterator[dict]]:
    """Header plus a lazy record iterator."""
    fh = open(path, encoding="utf-8")
    first = fh.readline()
    meta = None
    pending = None
    if first.strip():
        try:
            obj = json.loads(first)
        except json.JSONDecodeError:
            fh.close()
            raise ValueError(f"{path}:1: invalid JSON") from None
        if isinstance(obj, dict) and "_meta" in obj:
            meta = obj["_meta"]
        else:
            pending = obj
    if require_meta or meta is not None:
        try:
            check_meta(meta, str(path), kinds)
        except ProvenanceError:
            fh.close()
            raise

    def records():
        with fh:
            if pending is not None:
                yield pending
            for lineno, line in enumerate(fh, 2):
                if not line.strip():
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    raise ValueError(f"{path}:{lineno}: invalid JSON") from None

    return meta, records()


# -- CSV -------------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: str | Path, meta: dict | None, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    rows = list(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(meta, header, rows))
    return len(rows)


def csv_text(meta: dict | None, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    if meta is not None:
        buf.write(CSV_PREFIX + canonical_json(meta) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv(path: str | Path, required: Sequence[str], kinds: Iterable[str] | None = None, require_meta: bool = False) -> tuple[dict | None, list[dict]]:
    """Rows as dicts. A metadata comment line is honoured when present.

    Hand-made inputs (labels, co-occurrence counts) carry no header, so the
    metadata is optional unless ``require_meta``.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return parse_csv(text, str(path), required, kinds, require_meta)


def parse_csv(text: str, where: str, required: Sequence[str], kinds=None, require_meta=False):
    meta = None
    lines = text.splitlines(keepends=True)
    body = []
    for line in lines:
        if line.startswith(CSV_PREFIX) and meta is None and not body:
            try:
                meta = json.loads(line[len(CSV_PREFIX) :])
            except json.JSONDecodeError:
                raise ValueError(f"{where}: malformed metadata line") from None
        elif line.startswith("#") or not line.strip():
            continue
        else:
            body.append(line)
    if require_meta or meta is not None:
        check_meta(meta, where, kinds)
    reader = csv.DictReader(body)
    fields = reader.fieldnames or []
    missing = [c for c in required if c not in fields]
    if missing:
        raise ValueError(f"{where}: missing column(s) {', '.join(missing)}")
    return meta, list(reader)


def write_json(path: str | Path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def read_json(path: str | Path, kinds: Iterable[str] | None = None) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc.msg})") from None
    check_meta(obj.get("meta"), str(path), kinds)
    return obj
