"""Report trees and their text, markdown, JSON and SVG renderings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from xml.sax.saxutils import escape

from .effects import EffectEstimates, Extended, round_half_away

FORMATS = ("text", "markdown", "json")
EFFECT_COLUMNS = ("p0", "θ", "λ_SO", "λ_WR")


@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)


@dataclass
class Report:
    command: str
    payload: dict
    tables: list[Table] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    svg: str | None = None


def fmt_number(x, digits: int = 3, fmt: str = "text") -> str:
    """Display form of a cell: half-away-from-zero rounding, ∞ and – for extended states."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, Extended):
        if x.is_inf:
            return "∞" if fmt == "text" else "inf"
        if x.is_undefined:
            return "–" if fmt == "text" else "undef"
        x = x.value
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return ("∞" if fmt == "text" else "inf") if x > 0 else "-∞"
        if math.isnan(x):
            return "–" if fmt == "text" else "undef"
        x = Fraction(x)
    q = round_half_away(Fraction(x), digits)
    sign = "-" if q < 0 else ""
    scaled = abs(q) * 10**digits
    whole = int(scaled)
    if digits == 0:
        return f"{sign}{whole}"
    s = str(whole).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def effect_row(label, e: EffectEstimates) -> list:
    return [label, e.p_zero, e.theta, e.lambda_so, e.lambda_wr]


def effects_table(title: str, rows: list[tuple[str, EffectEstimates]], first: str = "Comparison") -> Table:
    return Table(title, [first, *EFFECT_COLUMNS], [effect_row(lbl, e) for lbl, e in rows])


def render_text(report: Report, digits: int = 3) -> str:
    out = []
    for t in report.tables:
        cells = [[fmt_number(c, digits, "text") for c in row] for row in t.rows]
        widths = [len(c) for c in t.columns]
        for row in cells:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]
        if t.title:
            out.append(t.title)
        out.append("  ".join(c.ljust(w) for c, w in zip(t.columns, widths)).rstrip())
        out.append("  ".join("-" * w for w in widths))
        for row in cells:
            out.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(row, widths))).rstrip())
        out.append("")
    out.extend(report.notes)
    return "\n".join(out).rstrip() + "\n"


def render_markdown(report: Report, digits: int = 3) -> str:
    out = []
    for t in report.tables:
        if t.title:
            out.append(f"**{t.title}**")
            out.append("")
        out.append("| " + " | ".join(t.columns) + " |")
        out.append("|" + "|".join(["---"] + ["---:"] * (len(t.columns) - 1)) + "|")
        for row in t.rows:
            out.append("| " + " | ".join(fmt_number(c, digits, "markdown") for c in row) + " |")
        out.append("")
    for n in report.notes:
        out.append(f"- {n}")
    return "\n".join(out).rstrip() + "\n"


def render_json(report: Report) -> str:
    doc = {"command": report.command, **report.payload}
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def render_report(report: Report, fmt: str = "text", digits: int = 3) -> bytes:
    if fmt == "text":
        s = render_text(report, digits)
    elif fmt == "markdown":
        s = render_markdown(report, digits)
    elif fmt == "json":
        s = render_json(report)
    else:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    return s.encode("utf-8")


def binary_bars_svg(q_a, q_b, labels=("A", "B"), digits: int = 3) -> str:
    """Two stacked bars of (q, 1 - q), success at the bottom."""
    width, height = 260, 300
    top, bottom = 30, 250
    bar_w = 70
    span = bottom - top
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
    ]
    for i, (q, lbl) in enumerate(zip((q_a, q_b), labels)):
        q = Fraction(q)
        x = 40 + i * 110
        h_succ = float(q) * span
        y_succ = bottom - h_succ
        qs = fmt_number(q, digits, "markdown")
        fs = fmt_number(1 - q, digits, "markdown")
        parts += [
            f'<rect x="{x}" y="{top}" width="{bar_w}" height="{span - h_succ:.3f}" fill="#d9d9d9" stroke="black"/>',
            f'<rect x="{x}" y="{y_succ:.3f}" width="{bar_w}" height="{h_succ:.3f}" fill="#4a7ab5" stroke="black"/>',
            f'<text x="{x + bar_w / 2}" y="{y_succ + 16:.3f}" text-anchor="middle" font-size="13" '
            f'font-family="sans-serif" fill="white">{qs}</text>',
            f'<text x="{x + bar_w / 2}" y="{top - 6}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{fs}</text>',
            f'<text x="{x + bar_w / 2}" y="{bottom + 22}" text-anchor="middle" font-size="14" '
            f'font-family="sans-serif">{escape(str(lbl))}</text>',
        ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
