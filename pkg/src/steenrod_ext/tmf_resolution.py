"""E1-page of the algebraic tmf-resolution, change of rings, and vanishing cross-checks.

The summand for a tuple (j_1, ..., j_n) is
Ext_{A(2)}(M_2(j_1) (x) ... (x) M_2(j_n) (x) X[-n]); the homological shift is
folded into the reported s, so that entry lives at (s + n, t) of the table for
the unshifted tensor product.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

from .brown_gitler import a_mod_a, m_comodule, n_comodule
from .modules import ComodulePresentation, DerivedObject, GradedModule, comodule_tensor, module_from_comodule, \
    trivial_comodule
from .resolution import ExtTable, FreeChainComplex, ResolutionError, minimal_resolution, realize
from .steenrod import get_slice
from .vanishing import REGION_LARGE_ENTRY, REGION_ALL_ONES, AuditReport, Region, audit, bg_region

Tuple = tuple


def tuples_up_to(n_max: int, t_max: int) -> list[Tuple]:
    """Ordered tuples of positive integers, length <= n_max, with 8 * sum <= t_max."""
    out: list[Tuple] = [()]
    budget = t_max // 8

    def rec(prefix: tuple, left: int) -> None:
        if len(prefix) == n_max:
            return
        for j in range(1, left + 1):
            cur = prefix + (j,)
            out.append(cur)
            rec(cur, left - j)

    rec((), budget)
    return sorted(out, key=lambda x: (len(x), x))


def format_tuple(tp: Tuple) -> str:
    return ",".join(str(j) for j in tp) if tp else "-"


def parse_tuple(text: str) -> Tuple:
    text = text.strip()
    return () if text in ("-", "") else tuple(int(x) for x in text.split(","))


@lru_cache(maxsize=None)
def _m2_comodule(j: int) -> ComodulePresentation:
    return m_comodule(2, j).comodule


def tuple_comodule(tp: Tuple) -> ComodulePresentation:
    c = trivial_comodule()
    for j in tp:
        c = comodule_tensor(c, _m2_comodule(j))
    return c


def tuple_module(tp: Tuple) -> GradedModule:
    """M_2(j_1) (x) ... (x) M_2(j_n) as a module over A(2)."""
    return module_from_comodule(tuple_comodule(tp), get_slice("A2"),
                                name="M2(" + format_tuple(tp) + ")" if tp else "F2")


@dataclass
class E1Page:
    x_name: str
    n_max: int
    s_max: int
    t_max: int
    entries: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def tuples(self) -> list[Tuple]:
        return sorted(self.tables, key=lambda x: (len(x), x))

    def table(self, tp: Tuple) -> ExtTable:
        return self.tables[tuple(tp)]

    def dim(self, n: int, tp: Tuple, s: int, t: int) -> int:
        return self.entries.get((n, tuple(tp), s, t), 0)

    def to_tsv(self) -> str:
        lines = [f"# E1 page for {self.x_name} window n<={self.n_max} s<={self.s_max} t<={self.t_max}",
                 "n\tj-tuple\ts\tt\tdim"]
        for (n, tp, s, t), v in sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], kv[0][3])):
            if v:
                lines.append(f"{n}\t{format_tuple(tp)}\t{s}\t{t}\t{v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "E1Page":
        page = cls("", 0, 0, 0)
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("n\t"):
                continue
            n, tp, s, t, v = line.split("\t")
            key = (int(n), parse_tuple(tp), int(s), int(t))
            page.entries[key] = int(v)
            page.n_max = max(page.n_max, key[0])
            page.s_max = max(page.s_max, key[2])
            page.t_max = max(page.t_max, key[3])
        return page


def tuple_ext(cx: FreeChainComplex, tp: Tuple, stem_max: Optional[int] = None) -> ExtTable:
    """Ext_{A(2)}(M_2(tp) (x) X[-n]) from a complex computing Ext(X); indexed with the shift folded in."""
    n = len(tp)
    w = tuple_module(tp)
    raw = cx.tensor_ext(w, title=format_tuple(tp), stem_max=None if stem_max is None else stem_max + n)
    return raw.reindexed(0, -n)


def e1_page(x: Union[GradedModule, DerivedObject], n_max: int, s_max: int, t_max: int, threads: int = 1,
            stem_max: Optional[int] = None, x_name: str = "") -> E1Page:
    """All summands of the E1-page with 8 * sum(j) <= t_max."""
    cx, ts, ss = realize(x, s_max + 1, t_max, threads=threads)
    if cx.slice.key != "A2":
        raise ResolutionError(f"the E1-page is assembled over A(2), not {cx.slice.key}")
    tps = tuples_up_to(n_max, t_max)
    name = x_name or getattr(x, "name", "") or type(x).__name__

    def one(tp: Tuple) -> tuple:
        try:
            tab = tuple_ext(cx, tp, stem_max)
        except Exception as exc:  # keep the offending tuple in the message
            raise ResolutionError(f"tuple {format_tuple(tp)}: {exc}") from exc
        return tp, tab.reindexed(ts, ss) if (ts or ss) else tab

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(one, tps))
    else:
        results = [one(tp) for tp in tps]
    page = E1Page(name, n_max, s_max, t_max)
    for tp, tab in results:
        page.tables[tp] = tab
        for (s, t), v in tab.dims.items():
            if v and s <= s_max and t <= t_max:
                page.entries[(len(tp), tp, s, t)] = v
    return page


# ---------------------------------------------------------------------------
# change of rings


@dataclass
class ChangeOfRingsReport:
    w_name: str
    t_max: int
    full: ExtTable
    sub: ExtTable
    mismatches: list

    @property
    def passed(self) -> bool:
        return not self.mismatches


def truncate_comodule(c: ComodulePresentation, t_max: int) -> ComodulePresentation:
    """The subcomodule spanned by basis elements of degree <= t_max (the coaction lowers degree)."""
    keep = [k for k, d in enumerate(c.degrees) if d <= t_max]
    new = {k: n for n, k in enumerate(keep)}
    coaction = tuple(tuple((l, new[b]) for l, b in c.coaction[k]) for k in keep)
    return ComodulePresentation(tuple(c.labels[k] for k in keep), tuple(c.degrees[k] for k in keep),
                                coaction, c.over)


def change_of_rings_check(w_comodule: ComodulePresentation, t_max: int = 20, w_name: str = "W",
                          threads: int = 1) -> ChangeOfRingsReport:
    """Ext_A((A//A(2))_* (x) W) versus Ext_{A(2)}(W) for all (s, t) with t <= t_max.

    The degree <= t_max part of (A//A(2))_* is a subcomodule whose quotient sits
    above t_max, so it gives the same Ext in degrees t <= t_max.
    """
    bottom = min(w_comodule.degrees) if w_comodule.degrees else 0
    quotient = a_mod_a(2, t_max - bottom).comodule
    big = truncate_comodule(comodule_tensor(quotient, w_comodule), t_max)
    sl = get_slice("A", t_max - min(big.degrees))
    full_mod = module_from_comodule(big, sl, name=f"A//A2*{w_name}")
    s_top = t_max - bottom + 1
    full = minimal_resolution(full_mod, s_top, t_max, threads=threads).ext_table()
    sub_mod = module_from_comodule(w_comodule, get_slice("A2"), name=w_name)
    sub = minimal_resolution(sub_mod, s_top, t_max, threads=threads).ext_table()
    keys = {k for k in set(full.dims) | set(sub.dims) if k[1] <= t_max}
    mism = sorted((s, t, full.dim(s, t), sub.dim(s, t)) for s, t in keys if full.dim(s, t) != sub.dim(s, t))
    return ChangeOfRingsReport(w_name, t_max, full.restricted(s_top, t_max), sub.restricted(s_top, t_max), mism)


def n11_comodule() -> ComodulePresentation:
    return n_comodule(1, 1).comodule


# ---------------------------------------------------------------------------
# vanishing cross-checks


def region_for_tuple(tp: Tuple) -> tuple[Region, str]:
    """The must-vanish region for a summand, with its provenance.

    () uses the N_1(0) region and (1) the N_1(1) region moved through
    M_2(1) = Sigma^8 N_1(1) and the shift [-1]; (1, 1) moves it once more.
    Tuples with an entry >= 2 use the large-entry region and all-ones tuples
    of length >= 3 the all-ones region.
    """
    if not tp:
        return bg_region(0), "N_1(0) region"
    if any(j >= 2 for j in tp):
        return REGION_LARGE_ENTRY, "entry>=2 region"
    if len(tp) >= 3:
        return REGION_ALL_ONES, "all-ones region"
    reg = bg_region(1).suspended(8, 1)
    if len(tp) == 2:
        reg = reg.suspended(8, 1)
    why = f"N_1(1) region shifted (n={len(tp)})"
    return Region(reg.c7, reg.c6, reg.c5, why), why


def vanishing_crosscheck(page: E1Page, stem_max: Optional[int] = None) -> list[AuditReport]:
    out = []
    for tp in page.tuples():
        reg, why = region_for_tuple(tp)
        rep = audit(page.table(tp), reg, name=f"tuple {format_tuple(tp)} vs {why}", stem_max=stem_max)
        out.append(rep)
    return out
