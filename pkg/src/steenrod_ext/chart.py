"""Adams-style charts: a plain data spec and byte-deterministic SVG, TSV and ASCII emitters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .resolution import ExtTable

MARKERS = ("filled", "open", "box", "diamond")
LINE_KINDS = ("h0", "h1", "h2", "v1-period", "annotation")
DotKey = tuple  # (stem, s, index)


@dataclass(frozen=True, order=True)
class Dot:
    stem: int
    s: int
    index: int
    marker: str = "filled"

    @property
    def key(self) -> DotKey:
        return (self.stem, self.s, self.index)


@dataclass(frozen=True, order=True)
class Line:
    a: DotKey
    b: DotKey
    kind: str


@dataclass(frozen=True, order=True)
class Differential:
    a: DotKey
    b: DotKey
    page: int


@dataclass
class ChartSpec:
    dots: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    differentials: list = field(default_factory=list)
    title: str = ""

    def validate(self) -> None:
        keys = {d.key for d in self.dots}
        if len(keys) != len(self.dots):
            raise ValueError("duplicate dot")
        for d in self.dots:
            if d.marker not in MARKERS:
                raise ValueError(f"unknown marker {d.marker!r}")
        for ln in self.lines:
            if ln.kind not in LINE_KINDS:
                raise ValueError(f"unknown line kind {ln.kind!r}")
            for end in (ln.a, ln.b):
                if end not in keys:
                    raise ValueError(f"line {ln.kind} refers to a missing dot {end}")
        for df in self.differentials:
            for end in (df.a, df.b):
                if end not in keys:
                    raise ValueError(f"d{df.page} refers to a missing dot {end}")

    def normalized(self) -> "ChartSpec":
        return ChartSpec(sorted(self.dots), sorted(set(self.lines)), sorted(set(self.differentials)), self.title)

    def dot_multiset(self) -> list:
        return sorted(self.dots)


Marking = Union[None, dict, Callable[[int, int, int], str]]


def chart_from_ext(table: ExtTable, products: Optional[dict] = None, markers: Marking = None,
                   title: str = "") -> ChartSpec:
    """One dot per generator; h0/h1/h2 lines from a product ledger.

    ``products`` maps ("h<i>", s, t, index) to the indices hit at
    (s + 1, t + 2^i); it defaults to the table's own ledger.  ``markers``
    classifies dots by (s, t, index).
    """
    ledger = table.products if products is None else products
    dots = []
    for (s, t), v in sorted(table.dims.items()):
        for i in range(v):
            if callable(markers):
                mk = markers(s, t, i)
            elif markers:
                mk = markers.get((s, t, i), "filled")
            else:
                mk = "filled"
            dots.append(Dot(t - s, s, i, mk))
    keys = {d.key for d in dots}
    lines = []
    for key, tgts in sorted(ledger.items()):
        name, s, t, idx = key
        if name not in ("h0", "h1", "h2"):
            continue
        shift = 1 << int(name[1])
        a = (t - s, s, idx)
        for j in tgts:
            b = (t + shift - s - 1, s + 1, j)
            if a in keys and b in keys:
                lines.append(Line(a, b, name))
    spec = ChartSpec(dots, lines, [], title or table.title)
    return spec.normalized()


def load_annotations(text: str, spec: ChartSpec) -> ChartSpec:
    """Add lines and differentials from a plain text file.

    ``d <r> <stem> <s> <i> <stem> <s> <i>`` adds a d_r; ``line <kind> ...`` a
    line; ``mark <marker> <stem> <s> <i>`` re-marks a dot.
    """
    lines = list(spec.lines)
    diffs = list(spec.differentials)
    marks = {}
    for raw in text.splitlines():
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        if parts[0] == "d" and len(parts) == 8:
            nums = [int(x) for x in parts[1:]]
            diffs.append(Differential(tuple(nums[1:4]), tuple(nums[4:7]), nums[0]))
        elif parts[0] == "line" and len(parts) == 8:
            nums = [int(x) for x in parts[2:]]
            lines.append(Line(tuple(nums[0:3]), tuple(nums[3:6]), parts[1]))
        elif parts[0] == "mark" and len(parts) == 5:
            marks[tuple(int(x) for x in parts[2:])] = parts[1]
        else:
            raise ValueError(f"bad annotation line {raw!r}")
    dots = [Dot(d.stem, d.s, d.index, marks.get(d.key, d.marker)) for d in spec.dots]
    out = ChartSpec(dots, lines, diffs, spec.title).normalized()
    out.validate()
    return out


# ---------------------------------------------------------------------------
# emitters


def emit(spec: ChartSpec, fmt: str) -> str:
    spec = spec.normalized()
    if fmt == "tsv":
        return _emit_tsv(spec)
    if fmt == "ascii":
        return _emit_ascii(spec)
    if fmt == "svg":
        return _emit_svg(spec)
    raise ValueError(f"unknown chart format {fmt!r}; expected svg, tsv or ascii")


def _emit_tsv(spec: ChartSpec) -> str:
    out = [f"# chart\t{spec.title}", "kind\tstem\ts\tindex\tmarker"]
    for d in spec.dots:
        out.append(f"dot\t{d.stem}\t{d.s}\t{d.index}\t{d.marker}")
    for ln in spec.lines:
        out.append("line\t" + "\t".join(str(x) for x in (*ln.a, *ln.b)) + f"\t{ln.kind}")
    for df in spec.differentials:
        out.append("diff\t" + "\t".join(str(x) for x in (*df.a, *df.b)) + f"\t{df.page}")
    return "\n".join(out) + "\n"


def parse_chart_tsv(text: str) -> ChartSpec:
    spec = ChartSpec()
    for raw in text.splitlines():
        if not raw.strip():
            continue
        cols = raw.split("\t")
        if cols[0] == "# chart":
            spec.title = cols[1] if len(cols) > 1 else ""
        elif cols[0] == "dot":
            spec.dots.append(Dot(int(cols[1]), int(cols[2]), int(cols[3]), cols[4]))
        elif cols[0] == "line":
            nums = [int(x) for x in cols[1:7]]
            spec.lines.append(Line(tuple(nums[:3]), tuple(nums[3:]), cols[7]))
        elif cols[0] == "diff":
            nums = [int(x) for x in cols[1:7]]
            spec.differentials.append(Differential(tuple(nums[:3]), tuple(nums[3:]), int(cols[7])))
        elif cols[0] in ("kind",) or raw.startswith("#"):
            continue
        else:
            raise ValueError(f"bad chart row {raw!r}")
    spec = spec.normalized()
    spec.validate()
    return spec


_ASCII = {"filled": "*", "open": "o", "box": "#", "diamond": "^"}


def _emit_ascii(spec: ChartSpec) -> str:
    if not spec.dots:
        return (spec.title + "\n" if spec.title else "") + "(empty chart)\n"
    stems = [d.stem for d in spec.dots]
    lo, hi = min(stems), max(stems)
    s_hi = max(d.s for d in spec.dots)
    cells: dict = {}
    for d in spec.dots:
        cells.setdefault((d.stem, d.s), []).append(d)
    width = 3
    rows = [spec.title] if spec.title else []
    for s in range(s_hi, -1, -1):
        line = f"{s:>3} |"
        for u in range(lo, hi + 1):
            here = cells.get((u, s), [])
            if not here:
                txt = "."
            elif len(here) == 1:
                txt = _ASCII[here[0].marker]
            else:
                txt = str(len(here))
            line += txt.rjust(width)
        rows.append(line.rstrip())
    rows.append("    +" + "-" * (width * (hi - lo + 1)))
    axis = "     "
    for u in range(lo, hi + 1):
        axis += (str(u) if u % 5 == 0 else "").rjust(width)
    rows.append(axis.rstrip())
    return "\n".join(rows) + "\n"


_CELL = 24
_PAD = 36


def _emit_svg(spec: ChartSpec) -> str:
    if spec.dots:
        lo = min(d.stem for d in spec.dots)
        hi = max(d.stem for d in spec.dots)
        s_hi = max(d.s for d in spec.dots)
    else:
        lo = hi = s_hi = 0
    n_cols = hi - lo + 1
    n_rows = s_hi + 1
    w = 2 * _PAD + n_cols * _CELL
    h = 2 * _PAD + n_rows * _CELL
    per_cell: dict = {}
    for d in spec.dots:
        per_cell.setdefault((d.stem, d.s), []).append(d.index)

    def center(key: DotKey) -> tuple[int, int]:
        stem, s, i = key
        k = sorted(per_cell.get((stem, s), [i])).index(i) if (stem, s) in per_cell else 0
        n = len(per_cell.get((stem, s), [i]))
        x = _PAD + (stem - lo) * _CELL + _CELL // 2 + (k - (n - 1) / 2) * 6
        y = h - _PAD - s * _CELL - _CELL // 2
        return (int(round(x * 2)) / 2, y)

    def num(v) -> str:
        return f"{v:g}"

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
           f'viewBox="0 0 {w} {h}">']
    if spec.title:
        out.append(f'<title>{_esc(spec.title)}</title>')
    out.append('<g stroke="#dddddd" stroke-width="0.5">')
    for c in range(n_cols + 1):
        x = _PAD + c * _CELL
        out.append(f'<line x1="{x}" y1="{_PAD}" x2="{x}" y2="{h - _PAD}"/>')
    for r in range(n_rows + 1):
        y = _PAD + r * _CELL
        out.append(f'<line x1="{_PAD}" y1="{y}" x2="{w - _PAD}" y2="{y}"/>')
    out.append('</g>')
    out.append('<g font-family="monospace" font-size="9" fill="#000000">')
    for c in range(n_cols):
        stem = lo + c
        if stem % 2 == 0:
            out.append(f'<text x="{_PAD + c * _CELL + _CELL // 2}" y="{h - _PAD + 12}" '
                       f'text-anchor="middle">{stem}</text>')
    for r in range(n_rows):
        out.append(f'<text x="{_PAD - 6}" y="{h - _PAD - r * _CELL - _CELL // 2 + 3}" text-anchor="end">{r}</text>')
    out.append('</g>')
    colors = {"h0": "#000000", "h1": "#000000", "h2": "#000000", "v1-period": "#1f5fbf", "annotation": "#808080"}
    out.append('<g stroke-width="1">')
    for ln in spec.lines:
        (x1, y1), (x2, y2) = center(ln.a), center(ln.b)
        dash = ' stroke-dasharray="3,2"' if ln.kind in ("v1-period", "annotation") else ""
        out.append(f'<line class="{ln.kind}" x1="{num(x1)}" y1="{num(y1)}" x2="{num(x2)}" y2="{num(y2)}" '
                   f'stroke="{colors[ln.kind]}"{dash}/>')
    for df in spec.differentials:
        (x1, y1), (x2, y2) = center(df.a), center(df.b)
        out.append(f'<line class="d{df.page}" x1="{num(x1)}" y1="{num(y1)}" x2="{num(x2)}" y2="{num(y2)}" '
                   f'stroke="#c00000"/>')
    out.append('</g>')
    out.append('<g stroke="#000000" stroke-width="1">')
    for d in spec.dots:
        x, y = center(d.key)
        if d.marker == "filled":
            out.append(f'<circle cx="{num(x)}" cy="{num(y)}" r="2.5" fill="#000000"/>')
        elif d.marker == "open":
            out.append(f'<circle cx="{num(x)}" cy="{num(y)}" r="2.5" fill="#ffffff"/>')
        elif d.marker == "box":
            out.append(f'<rect x="{num(x - 3)}" y="{num(y - 3)}" width="6" height="6" fill="#ffffff"/>')
        else:
            out.append(f'<polygon points="{num(x)},{num(y - 3.5)} {num(x + 3.5)},{num(y)} '
                       f'{num(x)},{num(y + 3.5)} {num(x - 3.5)},{num(y)}" fill="#ffffff"/>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
