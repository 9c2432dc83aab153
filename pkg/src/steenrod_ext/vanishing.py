"""Vanishing-line recurrences and region predicates, with audits of computed Ext tables.

A region is ``s > max{(u + c_7)/7, (u + c_6)/6, (u + c_5)/5}`` with ``u = t - s``.
All comparisons are exact integer cross-multiplications.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from .resolution import ExtTable

Predicate = Callable[[int, int], bool]


@dataclass(frozen=True)
class VanishingProfile:
    j: int
    a: int
    b: int


@lru_cache(maxsize=None)
def _ab(j: int) -> tuple[int, int]:
    if j < 0:
        raise ValueError("j must be non-negative")
    if j == 0:
        return (21, 9)
    if j == 1:
        return (15, 2)
    h = j // 2
    if j % 2 == 0:
        a_prev, b_prev = _ab(h - 1)
        a_h, b_h = _ab(h)
        return (max(a_prev - 8 * h - 2, a_h - 8 * h), max(b_prev - 8 * h - 3, b_h - 8 * h))
    a_h, b_h = _ab(h)
    return (a_h - 8 * h, b_h - 8 * h)


def profile(j: int) -> VanishingProfile:
    a, b = _ab(j)
    return VanishingProfile(j, a, b)


@dataclass(frozen=True)
class Region:
    """``s > (u + c7)/7``, ``s > (u + c6)/6`` and ``s > (u + c5)/5`` all hold."""

    c7: int
    c6: int
    c5: int
    name: str = ""

    def __call__(self, s: int, t: int) -> bool:
        u = t - s
        return 7 * s > u + self.c7 and 6 * s > u + self.c6 and 5 * s > u + self.c5

    def suspended(self, d: int, n: int = 1) -> "Region":
        """The region for Sigma^d Y[-n] given the region for Y.

        Ext^{s,t}(Sigma^d Y[-n]) = Ext^{s-n,t-d}(Y), so each constant c over
        slope 1/m becomes c + n(m + 1) - d.
        """
        return Region(self.c7 + n * 8 - d, self.c6 + n * 7 - d, self.c5 + n * 6 - d,
                      f"Sigma^{d} {self.name}[-{n}]")


def bg_region(j: int) -> Region:
    """Where Ext_{A(2)}(N_1(j) (x) H(1,4)) must vanish."""
    p = profile(j)
    return Region(17, p.a, p.b, f"N_1({j}) region")


# tuples with some entry >= 2, and all-ones tuples of length >= 3
REGION_LARGE_ENTRY = Region(17, 2, -12, "entry>=2 region")
REGION_ALL_ONES = Region(17, 4, -17, "all-ones region")


def region_73(j: int, s: int, t: int) -> bool:
    return bg_region(j)(s, t)


def region_74(s: int, t: int) -> bool:
    return REGION_LARGE_ENTRY(s, t)


def region_75(s: int, t: int) -> bool:
    return REGION_ALL_ONES(s, t)


def region_a1_h14(s: int, t: int) -> bool:
    """Where Ext_{A(1)}(H(1,4)) must vanish: s > ((t - s) + 17)/7."""
    return 7 * s > (t - s) + 17


def named_region(key: str, j: int = 0) -> Region:
    """Region by its CLI key: 7.3 (with j), 7.4, 7.5 or a1."""
    key = key.strip()
    if key in ("7.3", "73"):
        return bg_region(j)
    if key in ("7.4", "74"):
        return REGION_LARGE_ENTRY
    if key in ("7.5", "75"):
        return REGION_ALL_ONES
    if key in ("a1", "A1"):
        return Region(17, -(10 ** 9), -(10 ** 9), "A(1) line")
    raise ValueError(f"unknown region {key!r}; expected 7.3, 7.4, 7.5 or a1")


@dataclass
class AuditReport:
    name: str
    violations: list = field(default_factory=list)
    checked: int = 0
    window: Optional[tuple] = None
    observed_range: Optional[int] = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        head = f"{self.name}: {'pass' if self.passed else 'FAIL'} ({self.checked} nonzero entries checked"
        if self.window:
            head += f", window s<={self.window[0]} t<={self.window[1]}"
        head += ")"
        if self.violations:
            head += "; violations at (t-s, s): " + ", ".join(f"({t - s},{s})" for s, t, _ in self.violations)
        return head


def audit(table: ExtTable, predicate: Predicate, name: str = "", stem_max: Optional[int] = None) -> AuditReport:
    """List every nonzero entry inside the must-vanish region."""
    rep = AuditReport(name or getattr(predicate, "name", "") or "audit", window=(table.s_max, table.t_max))
    for (s, t), v in sorted(table.dims.items()):
        if not v or (stem_max is not None and t - s > stem_max):
            continue
        rep.checked += 1
        if predicate(s, t):
            rep.violations.append((s, t, v))
    return rep


def first_clean_stem(table: ExtTable, predicate: Predicate, stem_max: int) -> Optional[int]:
    """Smallest stem u such that no violation occurs at stems >= u (within stem_max)."""
    bad = [t - s for (s, t), v in table.dims.items() if v and t - s <= stem_max and predicate(s, t)]
    return max(bad) + 1 if bad else None
