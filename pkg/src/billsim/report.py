"""Plain-text and CSV renderings of evaluation and bill-similarity results."""
from __future__ import annotations

from typing import Sequence

from billsim.aggregate import SectionCategory
from billsim.artifacts import csv_text, parse_csv
from billsim.classify import CLASS_NAMES
from billsim.metrics import EvalReport


def aligned_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, header))] + [[c if isinstance(c, str) else _fmt(c) for c in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    lines = []
    for n, r in enumerate(cells):
        lines.append("  ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(r, widths))).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def class_names(n_classes: int) -> list[str]:
    if n_classes == len(CLASS_NAMES):
        return list(CLASS_NAMES)
    if n_classes == len(SectionCategory):
        return [c.label for c in SectionCategory]
    return [str(k) for k in range(n_classes)]


def eval_rows(report: EvalReport) -> list[tuple[str, float]]:
    """Per-class F1 from the highest class down, then accuracy and macro F1."""
    names = class_names(len(report.per_class_f1))
    rows = [(f"{k} {names[k]}", report.per_class_f1[k]) for k in reversed(range(len(names)))]
    rows.append(("Accuracy", report.accuracy))
    rows.append(("Average Macro F1", report.macro_f1))
    return rows


def eval_text(report: EvalReport) -> str:
    out = aligned_table(["Class", "F1"], eval_rows(report))
    out += f"\nPearson r = {report.pearson:.4f}  (n = {report.n})\n"
    return out


def eval_csv(report: EvalReport, meta: dict | None = None) -> str:
    """Lossless metric,value listing (floats written with full precision)."""
    rows = [(f"f1_{k}", v) for k, v in enumerate(report.per_class_f1)]
    rows += [("accuracy", report.accuracy), ("macro_f1", report.macro_f1), ("pearson", report.pearson)]
    k = len(report.confusion)
    rows += [(f"confusion_{g}_{p}", report.confusion[g][p]) for g in range(k) for p in range(k)]
    return csv_text(meta, ["metric", "value"], rows)


def parse_eval_csv(text: str, where: str = "<eval csv>") -> EvalReport:
    _, rows = parse_csv(text, where, ["metric", "value"])
    vals = {r["metric"]: r["value"] for r in rows}
    n = sum(1 for key in vals if key.startswith("f1_"))
    try:
        conf = [[int(vals[f"confusion_{g}_{p}"]) for p in range(n)] for g in range(n)]
        return EvalReport(
            accuracy=float(vals["accuracy"]),
            macro_f1=float(vals["macro_f1"]),
            per_class_f1=[float(vals[f"f1_{k}"]) for k in range(n)],
            pearson=float(vals["pearson"]),
            confusion=conf,
        )
    except KeyError as exc:
        raise ValueError(f"{where}: missing metric {exc.args[0]!r}") from None


SUMMARY_HEADER = ("bin", "n", "mean", "median")


def summary_text(summary: Sequence[dict]) -> str:
    return aligned_table(["Bin", "Pairs", "Mean", "Median"], [(s["bin"], s["n"], s["mean"], s["median"]) for s in summary])


def summary_csv(summary: Sequence[dict], meta: dict | None = None) -> str:
    return csv_text(meta, SUMMARY_HEADER, [[s[k] for k in SUMMARY_HEADER] for s in summary])


def parse_summary_csv(text: str, where: str = "<summary csv>") -> list[dict]:
    _, rows = parse_csv(text, where, SUMMARY_HEADER)
    try:
        return [{"bin": r["bin"], "n": int(r["n"]), "mean": float(r["mean"]), "median": float(r["median"])} for r in rows]
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def stats_text(stats: dict) -> str:
    rows = [
        ("Bills", stats["bills"]),
        ("Subsections (parsed)", stats["subsections"]),
        ("Removed as boilerplate", stats["boilerplate_removed"]),
        ("Removed as too short", stats["short_removed"]),
        ("Subsections (after filtering and slicing)", stats["final_subsections"]),
        ("Average # words in subsection", f"{stats['mean_words']:.1f}"),
    ]
    return aligned_table(["Statistic", "Value"], [(k, v if isinstance(v, float) else str(v)) for k, v in rows])
