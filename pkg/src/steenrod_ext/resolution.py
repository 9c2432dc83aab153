"""Minimal free resolutions, Ext tables, chain maps, mapping cones and the cobar oracle.

Elements of a free module in internal degree t are stored as 0/1 vectors:
one block per generator g with t_g <= t, holding coordinates of the algebra
part in the generator-product basis of degree t - t_g (see
``AlgebraSlice.generator_basis``).  In that basis each basis element is
Sq(2^k) times a basis element of lower degree, so applying a differential to
a whole degree only needs left multiplication by the algebra generators.
"""

from __future__ import annotations

import bisect
import hashlib
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .f2linalg import BitMatrix, eliminate, mat_mul, pack_bits, solve, unpack_bits
from .modules import (
    ComodulePresentation,
    Cone,
    GradedModule,
    Plain,
    builtin,
    module_from_comodule,
    trivial_comodule,
)
from .steenrod import (
    AlgebraSlice,
    Exps,
    Sum,
    degree,
    format_sq,
    in_quotient,
    xi_coproduct,
    xor_into,
)

CACHE_ENV = "STEENROD_EXT_CACHE"
_ONE = np.uint64(1)


class ResolutionError(RuntimeError):
    """A window is too small, a cap is exceeded, or a required lift does not exist."""


# ---------------------------------------------------------------------------
# dense GF(2) helpers


def _rref_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    w = pack_bits(rows)
    piv = eliminate(w, rows.shape[1], full=True)
    return unpack_bits(w[: len(piv)], rows.shape[1])


def _rank(mat: np.ndarray) -> int:
    if mat.shape[0] == 0 or mat.shape[1] == 0:
        return 0
    if mat.shape[0] > mat.shape[1]:
        mat = mat.T
    w = pack_bits(mat)
    return len(eliminate(w, mat.shape[1], full=False))


def left_kernel(mat: np.ndarray) -> np.ndarray:
    """Reduced rows ``v`` spanning ``{v : v @ mat = 0}``."""
    n, m = mat.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    if m == 0 or not mat.any():
        return np.eye(n, dtype=np.uint8)
    aug = np.concatenate([mat, np.eye(n, dtype=np.uint8)], axis=1)
    w = pack_bits(aug)
    piv = eliminate(w, m, full=False)
    ker = unpack_bits(w[len(piv):], m + n)[:, m:]
    return _rref_rows(ker)


def complement_rows(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Reduced rows spanning span(kernel) modulo span(image)."""
    if kernel.shape[0] == 0:
        return kernel
    n = kernel.shape[1]
    kw = pack_bits(kernel)
    if image.shape[0] and image.any():
        iw = pack_bits(image)
        piv = eliminate(iw, n, full=True)
        for i, p in enumerate(piv):
            bit = _ONE << np.uint64(p & 63)
            hit = np.flatnonzero(kw[:, p >> 6] & bit)
            if hit.size:
                kw[hit] ^= iw[i]
    piv2 = eliminate(kw, n, full=True)
    return unpack_bits(kw[: len(piv2)], n)


def solve_rows(mat: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
    """Some row vector ``v`` with ``v @ mat = rhs``, preferring early rows."""
    if mat.shape[0] == 0:
        return np.zeros(0, dtype=np.uint8) if not np.any(rhs) else None
    if mat.shape[1] == 0:
        return np.zeros(mat.shape[0], dtype=np.uint8)
    return solve(BitMatrix.from_dense(mat.T), rhs)


# ---------------------------------------------------------------------------
# vector spaces that the differentials land in


class ModuleSpace:
    """A finite module as the target of an augmentation."""

    def __init__(self, module: GradedModule):
        self.module = module

    def dim(self, t: int) -> int:
        return self.module.dim_in(t)

    def apply_sq(self, k: int, x: np.ndarray, t: int) -> np.ndarray:
        blk = self.module.block((1 << k,), t)
        if x.shape[0] == 0 or blk.shape[0] == 0 or blk.shape[1] == 0:
            return np.zeros((x.shape[0], self.module.dim_in(t + (1 << k))), dtype=np.uint8)
        return mat_mul(x, blk)


class FreeSpace:
    """Free module on generators of non-decreasing degrees (the list may grow)."""

    def __init__(self, slice_: AlgebraSlice, degrees: list):
        self.slice = slice_
        self.degrees = degrees
        self._layouts: dict = {}

    def _count(self, t: int) -> int:
        return bisect.bisect_right(self.degrees, t)

    def layout(self, t: int) -> tuple:
        """``(starts, dims, algebra degrees)`` for the generators present in degree t."""
        n = self._count(t)
        key = (t, n)
        got = self._layouts.get(key)
        if got is None:
            starts, dims, ds = [], [], []
            pos = 0
            for g in range(n):
                d = t - self.degrees[g]
                starts.append(pos)
                ds.append(d)
                w = self.slice.dim(d)
                dims.append(w)
                pos += w
            got = (starts, dims, ds, pos)
            self._layouts[key] = got
        return got

    def dim(self, t: int) -> int:
        return self.layout(t)[3]

    def apply_sq(self, k: int, x: np.ndarray, t: int) -> np.ndarray:
        t2 = t + (1 << k)
        starts, dims, ds, _ = self.layout(t)
        starts2, dims2, _, total2 = self.layout(t2)
        out = np.zeros((x.shape[0], total2), dtype=np.uint8)
        if x.shape[0] == 0:
            return out
        for g in range(len(starts)):
            if dims[g] == 0 or dims2[g] == 0:
                continue
            blk = x[:, starts[g]: starts[g] + dims[g]]
            if not blk.any():
                continue
            out[:, starts2[g]: starts2[g] + dims2[g]] = mat_mul(blk, self.slice.left_sq_gb(k, ds[g]))
        return out

    def to_milnor(self, vec: np.ndarray, t: int) -> dict:
        """Generator -> Milnor sum for an element in degree t."""
        starts, dims, ds, _ = self.layout(t)
        out = {}
        for g in range(len(starts)):
            blk = vec[starts[g]: starts[g] + dims[g]]
            if not blk.any():
                continue
            mil = mat_mul(blk.reshape(1, -1), self.slice.generator_basis(ds[g])[1])[0]
            basis = self.slice.basis(ds[g])
            terms = tuple(basis[i] for i in np.flatnonzero(mil))
            if terms:
                out[g] = terms
        return out

    def from_milnor(self, entries: dict, t: int) -> np.ndarray:
        starts, dims, ds, total = self.layout(t)
        vec = np.zeros(total, dtype=np.uint8)
        for g, terms in entries.items():
            d = ds[g]
            mil = np.zeros(self.slice.dim(d), dtype=np.uint8)
            for r in terms:
                mil[self.slice.index(r)] ^= 1
            vec[starts[g]: starts[g] + dims[g]] = mat_mul(mil.reshape(1, -1),
                                                            self.slice.generator_basis(d)[2])[0]
        return vec


class FreeMap:
    """A map out of a free module, given by generator images, expanded degree by degree."""

    def __init__(self, source: FreeSpace, target, images: list, shift: int = 0):
        self.source = source
        self.target = target
        self.images = images
        self.shift = shift
        self._mats: dict = {}
        self._lock = threading.RLock()

    def matrix(self, t: int) -> np.ndarray:
        """Rows: basis of the source in degree t; columns: target in degree t - shift."""
        n = self.source._count(t)
        got = self._mats.get(t)
        if got is not None and got[0] == n:
            return got[1]
        sl = self.source.slice
        starts, dims, ds, total = self.source.layout(t)
        tdim = self.target.dim(t - self.shift)
        out = np.zeros((total, tdim), dtype=np.uint8)
        by_k: dict[int, tuple[list, list]] = {}
        for g in range(len(starts)):
            d = ds[g]
            if dims[g] == 0:
                continue
            if d == 0:
                out[starts[g]] = self.images[g]
                continue
            recipe = sl.generator_basis(d)[0]
            for i, (k, j) in enumerate(recipe):
                dest, src = by_k.setdefault(k, ([], []))
                dest.append(starts[g] + i)
                src.append((g, j))
        for k, (dest, src) in sorted(by_k.items()):
            tp = t - (1 << k)
            prev = self.matrix(tp)
            pstarts = self.source.layout(tp)[0]
            rows = [pstarts[g] + j for g, j in src]
            out[dest] = self.target.apply_sq(k, prev[rows], tp - self.shift)
        out.setflags(write=False)
        with self._lock:
            self._mats[t] = (n, out)
        return out

    def forget(self, below: Optional[int] = None) -> None:
        with self._lock:
            if below is None:
                self._mats.clear()
            else:
                for t in [t for t in self._mats if t < below]:
                    del self._mats[t]


# ---------------------------------------------------------------------------
# Ext tables


@dataclass
class ExtTable:
    """Ext dimensions on a window ``s <= s_max``, ``t <= t_max`` (also ``s >= s_min``, ``t >= t_min``)."""

    s_max: int
    t_max: int
    dims: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    products: dict = field(default_factory=dict)
    title: str = ""
    s_min: int = 0
    t_min: Optional[int] = None

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def in_window(self, s: int, t: int) -> bool:
        if s < self.s_min or s > self.s_max or t > self.t_max:
            return False
        return self.t_min is None or t >= self.t_min

    def nonzero(self) -> list:
        return sorted((k, v) for k, v in self.dims.items() if v)

    def total(self) -> int:
        return sum(self.dims.values())

    def restricted(self, s_max: int, t_max: int) -> "ExtTable":
        dims = {k: v for k, v in self.dims.items() if k[0] <= s_max and k[1] <= t_max}
        return ExtTable(min(s_max, self.s_max), min(t_max, self.t_max), dims, title=self.title,
                        s_min=self.s_min, t_min=self.t_min)

    def reindexed(self, t_shift: int, s_shift: int) -> "ExtTable":
        """Table of Sigma^t_shift X [s_shift] from the table of X."""
        dims = {(s - s_shift, t + t_shift): v for (s, t), v in self.dims.items()}
        labels = {(s - s_shift, t + t_shift): v for (s, t), v in self.labels.items()}
        return ExtTable(self.s_max - s_shift, self.t_max + t_shift, dims, labels, {}, self.title,
                        self.s_min - s_shift, None if self.t_min is None else self.t_min + t_shift)

    def same_dims(self, other: "ExtTable") -> bool:
        return {k: v for k, v in self.dims.items() if v} == {k: v for k, v in other.dims.items() if v}

    def to_tsv(self) -> str:
        lines = [f"# window\t{self.s_max}\t{self.t_max}", "s\tt\tdim"]
        for (s, t), v in self.nonzero():
            lines.append(f"{s}\t{t}\t{v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "ExtTable":
        s_max = t_max = None
        dims = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "window" and len(parts) == 3:
                    s_max, t_max = int(parts[1]), int(parts[2])
                continue
            if line.replace("\t", " ").split() == ["s", "t", "dim"]:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ValueError(f"bad TSV row {raw!r}")
            s, t, v = (int(c) for c in cols)
            if v:
                dims[(s, t)] = dims.get((s, t), 0) + v
        if s_max is None:
            s_max = max((s for s, _ in dims), default=0)
            t_max = max((t for _, t in dims), default=0)
        return cls(s_max, t_max, dims)


# ---------------------------------------------------------------------------
# generic complexes of free modules


def _sum_add(acc: dict, terms: Iterable) -> None:
    for r in terms:
        xor_into(acc, r)


class FreeChainComplex:
    """A bounded-below complex of free modules with Milnor-sum differential entries.

    ``entries[s][g]`` maps generator indices of stage ``s - 1`` to the Milnor
    sum multiplying them in ``d(g)``.
    """

    def __init__(self, slice_: AlgebraSlice, s_min: int, s_max: int, t_max: int,
                 degrees: dict, entries: dict, labels: Optional[dict] = None, title: str = ""):
        self.slice = slice_
        self.s_min = s_min
        self.s_max = s_max
        self.t_max = t_max
        self.degrees = {s: list(degrees.get(s, [])) for s in range(s_min, s_max + 1)}
        self.entries = {s: [dict(e) for e in entries.get(s, [{}] * len(self.degrees[s]))]
                        for s in range(s_min, s_max + 1)}
        self.labels = labels or {s: [f"[{s},{i}]" for i in range(len(self.degrees[s]))]
                                 for s in range(s_min, s_max + 1)}
        self.title = title

    def gens_at(self, s: int, t: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees.get(s, [])) if d == t]

    def unit_matrix(self, s: int, t: int) -> np.ndarray:
        """Sq(0)-coefficients of d from stage s to s - 1 in degree t."""
        rows = self.gens_at(s, t)
        cols = self.gens_at(s - 1, t)
        col_pos = {g: k for k, g in enumerate(cols)}
        mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for k, g in enumerate(rows):
            for h, terms in self.entries[s][g].items():
                if h in col_pos and () in terms:
                    mat[k, col_pos[h]] = 1
        return mat

    def is_minimal(self) -> bool:
        for s in self.entries:
            for e in self.entries[s]:
                for terms in e.values():
                    if () in terms:
                        return False
        return True

    def check_d_squared(self) -> list[str]:
        bad = []
        sl = self.slice
        for s in range(self.s_min + 2, self.s_max + 1):
            for g, e in enumerate(self.entries[s]):
                acc: dict = {}
                for h, a in e.items():
                    for k, b in self.entries[s - 1][h].items():
                        for r in sl.sum_product(a, b):
                            xor_into(acc, (k, r))
                if acc:
                    bad.append(f"d^2 != 0 on {self.labels[s][g]}")
        return bad

    def ext_table(self, title: str = "") -> ExtTable:
        """Ext(C, F2) from ranks of the unit parts; valid for s < s_max."""
        tab = ExtTable(self.s_max - 1, self.t_max, title=title or self.title, s_min=self.s_min)
        for s in range(self.s_min, self.s_max):
            ts = sorted(set(self.degrees[s]))
            for t in ts:
                if t > self.t_max:
                    continue
                n = len(self.gens_at(s, t))
                r_out = _rank(self.unit_matrix(s, t)) if s > self.s_min else 0
                r_in = _rank(self.unit_matrix(s + 1, t))
                v = n - r_out - r_in
                if v:
                    tab.dims[(s, t)] = v
        if self.is_minimal():
            for i in range(3):
                for (s, h), tgts in self.hi_ledger(i).items():
                    th = self.degrees[s][h]
                    src = (f"h{i}", s, th, self.gens_at(s, th).index(h))
                    tab.products[src] = tuple(sorted(self.gens_at(s + 1, th + (1 << i)).index(g)
                                                     for g in tgts))
        return tab

    def hi_ledger(self, i: int) -> dict:
        """For a minimal complex: h_i times the dual of generator ``(s, g)``."""
        r = (1 << i,)
        out: dict = {}
        for s in range(self.s_min + 1, self.s_max + 1):
            for g, e in enumerate(self.entries[s]):
                for h, terms in e.items():
                    if r in terms:
                        out.setdefault((s - 1, h), []).append(g)
        return out

    def minimize(self) -> "FreeChainComplex":
        """Cancel unit entries pairwise (Gaussian elimination of complexes)."""
        sl = self.slice
        alive = {s: set(range(len(self.degrees[s]))) for s in self.degrees}
        ent = {s: [dict(e) for e in self.entries[s]] for s in self.entries}
        # incoming[s][h] = generators of stage s whose differential involves h (stage s-1)
        incoming = {s: {} for s in ent}
        for s in ent:
            for g, e in enumerate(ent[s]):
                for h in e:
                    incoming[s].setdefault(h, set()).add(g)
        changed = True
        while changed:
            changed = False
            for s in range(self.s_min + 1, self.s_max + 1):
                for g in sorted(alive[s]):
                    unit = [h for h, a in ent[s][g].items() if a == ((),)]
                    if not unit:
                        continue
                    h0 = min(unit)
                    dg = ent[s][g]
                    for other in sorted(incoming[s].get(h0, set()) - {g}):
                        if other not in alive[s]:
                            continue
                        a = ent[s][other].get(h0)
                        if not a:
                            continue
                        eo = ent[s][other]
                        for h, b in dg.items():
                            acc: dict = {}
                            _sum_add(acc, eo.get(h, ()))
                            _sum_add(acc, sl.sum_product(a, b))
                            new = tuple(sorted(acc))
                            if new:
                                eo[h] = new
                                incoming[s].setdefault(h, set()).add(other)
                            else:
                                eo.pop(h, None)
                    # drop g from stage s and h0 from stage s-1
                    for h in dg:
                        incoming[s].get(h, set()).discard(g)
                    ent[s][g] = {}
                    alive[s].discard(g)
                    alive[s - 1].discard(h0)
                    if s - 1 in ent:
                        for h in ent[s - 1][h0]:
                            incoming[s - 1].get(h, set()).discard(h0)
                        ent[s - 1][h0] = {}
                    if s + 1 in ent:
                        for k in list(incoming[s + 1].get(g, ())):
                            ent[s + 1][k].pop(g, None)
                        incoming[s + 1][g] = set()
                    changed = True
        degrees, entries, labels = {}, {}, {}
        remap = {s: {g: k for k, g in enumerate(sorted(alive[s]))} for s in alive}
        for s in alive:
            keep = sorted(alive[s])
            degrees[s] = [self.degrees[s][g] for g in keep]
            labels[s] = [self.labels[s][g] for g in keep]
            entries[s] = []
            for g in keep:
                e = {}
                for h, a in ent[s][g].items():
                    if s - 1 in remap and h in remap[s - 1]:
                        e[remap[s - 1][h]] = a
                entries[s].append(e)
        return FreeChainComplex(sl, self.s_min, self.s_max, self.t_max, degrees, entries, labels,
                                self.title)

    def _cohomology(self, local: Callable[[int, int], list], pair: Callable[[int, int, int], np.ndarray],
                    t_lo: int, t_cap: int, stem_max: Optional[int], title: str) -> ExtTable:
        """Cohomology of a cochain complex with basis (g, v), v in local(t, t_g).

        ``pair(s, g, h)`` is the square matrix whose (v', v) entry is the
        coefficient of (g, v) in the coboundary of (h, v').
        """
        tab = ExtTable(self.s_max - 1, t_cap, title=title, s_min=self.s_min)
        top = self.s_max
        for t in range(t_lo, t_cap + 1):
            s_lo = self.s_min if stem_max is None else max(self.s_min, t - stem_max)
            if s_lo > top - 1:
                continue
            layouts: dict = {}

            def layout(s: int):
                got = layouts.get(s)
                if got is None:
                    offs, pos = {}, 0
                    for g, tg in enumerate(self.degrees.get(s, [])):
                        idx = local(t, tg)
                        if idx:
                            offs[g] = (pos, idx)
                            pos += len(idx)
                    got = (offs, pos)
                    layouts[s] = got
                return got

            ranks = {}
            for s in range(max(s_lo, self.s_min + 1), top + 1):
                src, n_src = layout(s - 1)
                tgt, n_tgt = layout(s)
                if not n_src or not n_tgt:
                    ranks[s] = 0
                    continue
                mat = np.zeros((n_src, n_tgt), dtype=np.uint8)
                for g, (cpos, cidx) in tgt.items():
                    for h in self.entries[s][g]:
                        hit = src.get(h)
                        if hit is None:
                            continue
                        rpos, ridx = hit
                        blk = pair(s, g, h)[np.ix_(ridx, cidx)]
                        mat[rpos: rpos + len(ridx), cpos: cpos + len(cidx)] ^= blk
                ranks[s] = _rank(mat)
            for s in range(s_lo, top):
                v = layout(s)[1] - ranks.get(s, 0) - ranks.get(s + 1, 0)
                if v:
                    tab.dims[(s, t)] = v
        return tab

    def tensor_ext(self, w: GradedModule, title: str = "", stem_max: Optional[int] = None) -> ExtTable:
        """Ext(W (x) C, F2) through the untwisting (a g) (x) x = sum a'(g (x) chi(a'') x).

        A cochain on the generator g (x) x of W (x) C_s has degree t_g + |x|;
        its coboundary picks up chi(a) x for each entry a of d.  ``stem_max``
        bounds t - s of the computed entries.
        """
        sl = self.slice
        chi_cache: dict = {}
        pair_cache: dict = {}

        def chi_matrix(r: Exps) -> np.ndarray:
            got = chi_cache.get(r)
            if got is None:
                got = np.zeros((w.dim, w.dim), dtype=np.uint8)
                for c in sl.conjugate(r):
                    got ^= w.matrix(c)
                chi_cache[r] = got
            return got

        def pair(s: int, g: int, h: int) -> np.ndarray:
            key = (s, g, h)
            got = pair_cache.get(key)
            if got is None:
                acc = np.zeros((w.dim, w.dim), dtype=np.uint8)
                for r in self.entries[s][g][h]:
                    acc ^= chi_matrix(r)
                got = np.ascontiguousarray(acc.T)
                pair_cache[key] = got
            return got

        gens = [d for v in self.degrees.values() for d in v]
        if not gens or not w.dim:
            return ExtTable(self.s_max - 1, self.t_max + (w.bottom if w.dim else 0), title=title,
                            s_min=self.s_min)
        return self._cohomology(lambda t, tg: w.indices(t - tg), pair, min(gens) + w.bottom,
                                self.t_max + w.bottom, stem_max, title)

    def hom_ext(self, n: GradedModule, title: str = "", stem_max: Optional[int] = None) -> ExtTable:
        """Ext(C, N) as cohomology of Hom_A(C, N); class (s, t) sends g to N_{t_g - t}."""
        pair_cache: dict = {}

        def pair(s: int, g: int, h: int) -> np.ndarray:
            key = (s, g, h)
            got = pair_cache.get(key)
            if got is None:
                got = np.zeros((n.dim, n.dim), dtype=np.uint8)
                for r in self.entries[s][g][h]:
                    got ^= n.matrix(r)
                pair_cache[key] = got
            return got

        gens = [d for v in self.degrees.values() for d in v]
        if not gens or not n.dim:
            return ExtTable(self.s_max - 1, self.t_max, title=title, s_min=self.s_min)
        return self._cohomology(lambda t, tg: n.indices(tg - t), pair, min(gens) - n.top,
                                self.t_max - n.top, stem_max, title)

    def to_text(self) -> str:
        lines = [f"# complex {self.title} over {self.slice.key} window {self.s_max} {self.t_max}"]
        for s in range(self.s_min, self.s_max + 1):
            for g, t in enumerate(self.degrees[s]):
                lines.append(f"gen {s} {g} {t} {self.labels[s][g]}")
            for g, e in enumerate(self.entries[s]):
                if not e:
                    continue
                parts = []
                for h in sorted(e):
                    for r in e[h]:
                        parts.append(f"{format_sq(r)} [{s - 1},{h}]")
                lines.append(f"d {s} {g} = " + " + ".join(parts))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# minimal resolutions


def module_generator_degrees(m: GradedModule) -> dict[int, int]:
    """Number of minimal module generators in each degree (dim M_d minus decomposables)."""
    out = {}
    for d, n in sorted(m.dims_by_degree().items()):
        blocks = [m.block((g,), d - g) for g in m.slice.generator_degrees() if m.dim_in(d - g)]
        dec = _rank(np.concatenate(blocks, axis=0)) if blocks else 0
        if n - dec:
            out[d] = n - dec
    return out


class Resolution:
    """Minimal free resolution of a finite module on the window s <= s_max, t <= t_max."""

    def __init__(self, module: GradedModule, s_max: int, t_max: int, threads: int = 1,
                 keep_matrices: bool = True):
        self.module = module
        self.slice = module.slice
        self.s_max = s_max
        self.t_max = t_max
        self.threads = max(1, threads)
        self.keep_matrices = keep_matrices
        self.degrees: list[list[int]] = [[] for _ in range(s_max + 1)]
        self.images: list[list[np.ndarray]] = [[] for _ in range(s_max + 1)]
        self.spaces = [FreeSpace(self.slice, self.degrees[s]) for s in range(s_max + 1)]
        self.target0 = ModuleSpace(module)
        self.maps = [FreeMap(self.spaces[s], self.spaces[s - 1] if s else self.target0, self.images[s])
                     for s in range(s_max + 1)]
        self._check_window()

    def _check_window(self) -> None:
        m = self.module
        late = [d for d, n in module_generator_degrees(m).items() if n and d > self.t_max]
        if late:
            raise ResolutionError(
                f"t_max={self.t_max} is below the module generator in degree {max(late)}; "
                "the window cannot present the module")
        sl = self.slice
        if not sl.is_finite and m.dim and self.t_max - m.bottom > sl.t_max:
            raise ResolutionError(f"window needs algebra degrees up to {self.t_max - m.bottom}, "
                                  f"beyond the truncation {sl.t_max}")

    # -- construction -------------------------------------------------------------
    def compute(self) -> "Resolution":
        m = self.module
        if m.dim == 0:
            return self
        kernels = {t: np.eye(m.dim_in(t), dtype=np.uint8) for t in range(m.bottom, self.t_max + 1)}
        for s in range(self.s_max + 1):
            fmap = self.maps[s]
            lo = m.bottom + s
            for t in range(lo, self.t_max + 1):
                ker = kernels.get(t)
                if ker is None or ker.shape[0] == 0:
                    continue
                cur = fmap.matrix(t)
                new = complement_rows(cur, ker)
                for row in new:
                    self.degrees[s].append(t)
                    self.images[s].append(np.ascontiguousarray(row, dtype=np.uint8))
            if s == self.s_max:
                break
            ts = list(range(lo, self.t_max + 1))
            if self.threads > 1:
                for t in ts:
                    fmap.matrix(t)
                with ThreadPoolExecutor(self.threads) as ex:
                    kers = list(ex.map(lambda t: left_kernel(fmap.matrix(t)), ts))
            else:
                kers = [left_kernel(fmap.matrix(t)) for t in ts]
            kernels = dict(zip(ts, kers))
            if not self.keep_matrices and s >= 1:
                self.maps[s - 1].forget()
        if not self.keep_matrices:
            for f in self.maps:
                f.forget()
        return self

    # -- readouts -------------------------------------------------------------------
    def gens_at(self, s: int, t: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees[s]) if d == t]

    def ext_table(self, title: str = "") -> ExtTable:
        tab = ExtTable(self.s_max, self.t_max, title=title or self.module.name)
        for s in range(self.s_max + 1):
            for t in self.degrees[s]:
                tab.dims[(s, t)] = tab.dims.get((s, t), 0) + 1
        for (s, t), v in tab.dims.items():
            tab.labels[(s, t)] = [f"[{s},{t},{i}]" for i in range(v)]
        for i in range(4):
            for key, tgts in self.hi_products(i).items():
                tab.products[(f"h{i}",) + key] = tgts
        return tab

    def entries(self, s: int, g: int) -> dict:
        """d(g) as generator -> Milnor sum (stage s >= 1)."""
        if s == 0:
            raise ValueError("stage 0 maps to the module, not to a free module")
        return self.spaces[s - 1].to_milnor(self.images[s][g], self.degrees[s][g])

    def augmentation(self, g: int) -> tuple:
        return tuple(int(x) for x in np.flatnonzero(self.images[0][g]))

    def hi_products(self, i: int) -> dict:
        """``(s, t, idx) -> indices at (s+1, t+2^i)``: h_i times the dual of a generator."""
        sl = self.slice
        d = 1 << i
        if not sl.contains((d,)) or (not sl.is_finite and d > sl.t_max):
            return {}
        to_m = sl.generator_basis(d)[1]
        col = sl.index((d,))
        coeff = to_m[:, col]
        out: dict = {}
        for s in range(1, self.s_max + 1):
            for g, tg in enumerate(self.degrees[s]):
                starts, dims, ds, _ = self.spaces[s - 1].layout(tg)
                vec = self.images[s][g]
                for h in range(len(starts)):
                    if ds[h] != d:
                        continue
                    blk = vec[starts[h]: starts[h] + dims[h]]
                    if int(blk.astype(np.int64) @ coeff.astype(np.int64)) & 1:
                        th = self.degrees[s - 1][h]
                        src = (s - 1, th, self.gens_at(s - 1, th).index(h))
                        out.setdefault(src, []).append(self.gens_at(s, tg).index(g))
        return {k: tuple(v) for k, v in out.items()}

    def hi_times(self, i: int, s: int, t: int, vec: Sequence[int]) -> np.ndarray:
        """h_i times a class at (s, t) given in the generator basis."""
        out = np.zeros(len(self.gens_at(s + 1, t + (1 << i))), dtype=np.uint8)
        for (s0, t0, idx), tgts in self.hi_products(i).items():
            if s0 == s and t0 == t and vec[idx]:
                for j in tgts:
                    out[j] ^= 1
        return out

    def hi_matrix(self, i: int, s: int, t: int) -> np.ndarray:
        """Matrix of h_i : Ext^{s,t} -> Ext^{s+1,t+2^i} (rows: source basis)."""
        n_src = len(self.gens_at(s, t))
        n_tgt = len(self.gens_at(s + 1, t + (1 << i)))
        mat = np.zeros((n_src, n_tgt), dtype=np.uint8)
        for (s0, t0, idx), tgts in self.hi_products(i).items():
            if s0 == s and t0 == t:
                for j in tgts:
                    mat[idx, j] ^= 1
        return mat

    def as_complex(self) -> FreeChainComplex:
        degrees = {s: list(self.degrees[s]) for s in range(self.s_max + 1)}
        entries = {0: [{} for _ in self.degrees[0]]}
        for s in range(1, self.s_max + 1):
            entries[s] = [self.entries(s, g) for g in range(len(self.degrees[s]))]
        return FreeChainComplex(self.slice, 0, self.s_max, self.t_max, degrees, entries,
                                title=self.module.name)

    def check(self) -> list[str]:
        """d.d = 0, minimality, and exactness (kernel = image) on the window."""
        bad = []
        for s in range(self.s_max + 1):
            for g, tg in enumerate(self.degrees[s]):
                starts, dims, ds, _ = (self.spaces[s - 1].layout(tg) if s else (None,) * 4)
                if s:
                    vec = self.images[s][g]
                    for h in range(len(starts)):
                        if ds[h] == 0 and vec[starts[h]: starts[h] + dims[h]].any():
                            bad.append(f"non-minimal entry at stage {s}, generator {g}")
                if s >= 1:
                    dd = mat_mul(self.images[s][g].reshape(1, -1), self.maps[s - 1].matrix(tg))
                    if dd.any():
                        bad.append(f"d.d != 0 on generator {g} of stage {s}")
        for s in range(self.s_max):
            for t in range(self.module.bottom + s, self.t_max + 1):
                d_s = self.maps[s].matrix(t)
                d_next = self.maps[s + 1].matrix(t)
                ker = d_s.shape[0] - _rank(d_s)
                if ker != _rank(d_next):
                    bad.append(f"not exact at stage {s}, degree {t}")
        if self.module.dim:
            for t in range(self.module.bottom, self.t_max + 1):
                if _rank(self.maps[0].matrix(t)) != self.module.dim_in(t):
                    bad.append(f"augmentation not onto in degree {t}")
        return bad

    def to_text(self) -> str:
        lines = [f"# resolution of {self.module.name} over {self.slice.key} "
                 f"window {self.s_max} {self.t_max}"]
        for s in range(self.s_max + 1):
            for g, t in enumerate(self.degrees[s]):
                lines.append(f"gen {s} {g} {t}")
                if s == 0:
                    lbl = " + ".join(self.module.labels[self.module.indices(t)[x]]
                                     for x in self.augmentation(g))
                    lines.append(f"eps {g} = {lbl}")
                else:
                    e = self.entries(s, g)
                    parts = [f"{format_sq(r)} [{s - 1},{h}]" for h in sorted(e) for r in e[h]]
                    lines.append(f"d {s} {g} = " + " + ".join(parts))
        return "\n".join(lines) + "\n"


def _module_fingerprint(m: GradedModule) -> str:
    h = hashlib.sha256()
    h.update(m.slice.key.encode())
    h.update(repr(m.degrees).encode())
    for r in sorted(m.action):
        h.update(repr(r).encode())
        h.update(np.packbits(m.action[r]).tobytes())
    return h.hexdigest()


def _cache_path(m: GradedModule, s_max: int, t_max: int) -> Optional[str]:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = hashlib.sha256(f"{_module_fingerprint(m)}:{s_max}:{t_max}".encode()).hexdigest()[:32]
    return os.path.join(root, f"res-{key}.npz")


def _save_cache(res: Resolution, path: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    arrays = {}
    for s in range(res.s_max + 1):
        arrays[f"deg{s}"] = np.asarray(res.degrees[s], dtype=np.int64)
        if res.images[s]:
            lens = np.asarray([len(v) for v in res.images[s]], dtype=np.int64)
            arrays[f"len{s}"] = lens
            arrays[f"img{s}"] = np.packbits(np.concatenate(res.images[s]))
    tmp = path + ".tmp.npz"
    np.savez_compressed(tmp, **arrays)
    os.replace(tmp, path)


def _load_cache(res: Resolution, path: str) -> bool:
    if not os.path.exists(path):
        return False
    with np.load(path) as data:
        for s in range(res.s_max + 1):
            degs = [int(x) for x in data[f"deg{s}"]]
            res.degrees[s].extend(degs)
            if degs:
                lens = data[f"len{s}"]
                bits = np.unpackbits(data[f"img{s}"])[: int(lens.sum())]
                pos = 0
                for n in lens:
                    res.images[s].append(bits[pos: pos + int(n)].astype(np.uint8))
                    pos += int(n)
    return True


def minimal_resolution(m: GradedModule, s_max: int, t_max: int, threads: int = 1,
                       keep_matrices: bool = True, use_cache: bool = True) -> Resolution:
    """Minimal resolution on the window; memoized on disk when the cache variable is set."""
    res = Resolution(m, s_max, t_max, threads=threads, keep_matrices=keep_matrices)
    path = _cache_path(m, s_max, t_max) if use_cache else None
    if path and _load_cache(res, path):
        return res
    res.compute()
    if path:
        _save_cache(res, path)
    return res


def ext_dims(res: Resolution) -> ExtTable:
    return res.ext_table()


# ---------------------------------------------------------------------------
# Ext classes, chain maps, products


@dataclass
class ExtClass:
    """A class of Ext^{s,t}(X, Y): a cocycle P_s(X) -> Sigma^t Y on the basis (g, y)."""

    s: int
    t: int
    res: Resolution
    target: GradedModule
    cocycle: np.ndarray
    name: str = ""

    def basis(self) -> list:
        return cochain_basis(self.res, self.s, self.t, self.target)

    def value(self, g: int) -> np.ndarray:
        """Cocycle value on generator g as a vector over Y_{t_g - t}."""
        tg = self.res.degrees[self.s][g]
        idx = self.target.indices(tg - self.t)
        out = np.zeros(len(idx), dtype=np.uint8)
        for k, (h, y) in enumerate(self.basis()):
            if h == g and self.cocycle[k]:
                out[idx.index(y)] ^= 1
        return out

    def is_zero(self) -> bool:
        return not coboundary_reduce(self).any()


def cochain_basis(res: Resolution, s: int, t: int, target: GradedModule) -> list:
    if s < 0 or s > res.s_max:
        return []
    return [(g, y) for g, tg in enumerate(res.degrees[s]) for y in target.indices(tg - t)]


def coboundary_matrix(res: Resolution, s: int, t: int, target: GradedModule) -> np.ndarray:
    """delta : Hom^{s,t} -> Hom^{s+1,t}, rows indexed by the source cochain basis."""
    src = cochain_basis(res, s, t, target)
    tgt = cochain_basis(res, s + 1, t, target)
    mat = np.zeros((len(src), len(tgt)), dtype=np.uint8)
    if not src or not tgt:
        return mat
    pos = {b: k for k, b in enumerate(src)}
    tgt_pos = {b: k for k, b in enumerate(tgt)}
    for g in sorted({g for g, _ in tgt}):
        for h, terms in res.entries(s + 1, g).items():
            for x in target.indices(res.degrees[s][h] - t):
                for y in target.act_sum(terms, x):
                    col = tgt_pos.get((g, y))
                    if col is not None:
                        mat[pos[(h, x)], col] ^= 1
    return mat


def coboundary_reduce(x: ExtClass) -> np.ndarray:
    """Canonical representative of the class modulo coboundaries."""
    if x.s == 0:
        return x.cocycle.copy()
    img = coboundary_matrix(x.res, x.s - 1, x.t, x.target)
    img = _rref_rows(img)
    v = x.cocycle.copy()
    if img.shape[0]:
        for row in img:
            p = int(np.flatnonzero(row)[0])
            if v[p]:
                v ^= row
    return v


@dataclass
class ExtBasis:
    """A basis of Ext^{s,t}(X, Y) as cocycles plus a coordinate map."""

    s: int
    t: int
    cocycles: np.ndarray
    image: np.ndarray

    @property
    def dim(self) -> int:
        return self.cocycles.shape[0]

    def coordinates(self, v: np.ndarray) -> Optional[np.ndarray]:
        """Coordinates of a cocycle in the basis (modulo coboundaries)."""
        stacked = np.concatenate([self.cocycles, self.image], axis=0) if self.image.shape[0] else self.cocycles
        sol = solve_rows(stacked, v)
        if sol is None:
            return None
        return sol[: self.dim]


def ext_basis(res: Resolution, s: int, t: int, target: GradedModule) -> ExtBasis:
    if s + 1 > res.s_max:
        raise ResolutionError(f"cocycle condition at s={s} needs stage {s + 1} of the resolution")
    n = len(cochain_basis(res, s, t, target))
    z = left_kernel(coboundary_matrix(res, s, t, target)) if n else np.zeros((0, 0), np.uint8)
    b = _rref_rows(coboundary_matrix(res, s - 1, t, target)) if s >= 1 else np.zeros((0, n), np.uint8)
    comp = complement_rows(b, z) if n else np.zeros((0, 0), np.uint8)
    return ExtBasis(s, t, comp, b)


def ext_class(res: Resolution, s: int, t: int, target: Optional[GradedModule] = None,
              index: int = 0, name: str = "") -> ExtClass:
    target = target if target is not None else builtin("F2", res.slice)
    eb = ext_basis(res, s, t, target)
    if index >= eb.dim:
        raise ResolutionError(f"Ext^{{{s},{t}}} has dimension {eb.dim}; no basis element {index}")
    return ExtClass(s, t, res, target, eb.cocycles[index].copy(), name)


def identity_class(res: Resolution) -> ExtClass:
    """The identity of Ext^{0,0}(X, X)."""
    basis = cochain_basis(res, 0, 0, res.module)
    v = np.zeros(len(basis), dtype=np.uint8)
    for k, (g, y) in enumerate(basis):
        tg = res.degrees[0][g]
        idx = res.module.indices(tg)
        if res.images[0][g][idx.index(y)]:
            v[k] = 1
    return ExtClass(0, 0, res, res.module, v, "1")


@dataclass
class ChainMap:
    """Lift of a class of Ext^{a,b}(X, Y): f_j : P_{a+j}(X) -> Sigma^b P_j(Y)."""

    a: int
    b: int
    source: Resolution
    target: Resolution
    images: list
    maps: list

    @property
    def s_max(self) -> int:
        return len(self.images) - 1

    def component(self, j: int) -> FreeMap:
        return self.maps[j]

    def entries(self, j: int, g: int) -> dict:
        tg = self.source.degrees[self.a + j][g]
        return self.target.spaces[j].to_milnor(self.images[j][g], tg - self.b)


def lift_chain_map(x: ExtClass, target: Resolution, s_max: Optional[int] = None) -> ChainMap:
    """Lift a cocycle P_a(X) -> Sigma^b Y through the resolution of Y."""
    src = x.res
    if target.module is not x.target and target.module.degrees != x.target.degrees:
        raise ResolutionError("the target resolution does not resolve the class's coefficient module")
    a, b = x.s, x.t
    top = min(src.s_max - a, target.s_max)
    if s_max is not None:
        top = min(top, s_max)
    if top < 0:
        raise ResolutionError("window exhausted before the class's stage")
    images: list = []
    maps: list = []
    for j in range(top + 1):
        stage = a + j
        imgs: list = []
        fmap = FreeMap(src.spaces[stage], target.spaces[j], imgs, shift=b)
        for g, tg in enumerate(src.degrees[stage]):
            tt = tg - b
            if tt > target.t_max:
                raise ResolutionError(f"lift needs degree {tt} of the target at stage {j}")
            if j == 0:
                rhs = x.value(g)
                dmat = target.maps[0].matrix(tt) if target.spaces[0].dim(tt) else \
                    np.zeros((0, len(rhs)), np.uint8)
            else:
                dg = src.images[stage][g].reshape(1, -1)
                rhs = mat_mul(dg, maps[j - 1].matrix(tg))[0]
                dmat = target.maps[j].matrix(tt)
            if dmat.shape[0] == 0:
                if np.any(rhs):
                    raise ResolutionError(f"lift fails at stage {j}: empty target in degree {tt}")
                imgs.append(np.zeros(0, dtype=np.uint8))
                continue
            v = solve_rows(dmat, rhs)
            if v is None:
                raise ResolutionError(f"lift fails at stage {j}, generator {g} (degree {tg})")
            imgs.append(v.astype(np.uint8))
        images.append(imgs)
        maps.append(fmap)
    return ChainMap(a, b, src, target, images, maps)


def yoneda_product(x: ExtClass, y: ExtClass, lift: Optional[ChainMap] = None) -> ExtClass:
    """x . y for y in Ext(X, Y) and x in Ext(Y, Z): the composite x o f_a(y)."""
    f = lift if lift is not None else lift_chain_map(y, x.res, s_max=x.s)
    if f.s_max < x.s:
        raise ResolutionError("lift does not reach the stage of x")
    s, t = x.s + y.s, x.t + y.t
    res = y.res
    z = x.target
    basis = cochain_basis(res, s, t, z)
    pos = {bb: k for k, bb in enumerate(basis)}
    out = np.zeros(len(basis), dtype=np.uint8)
    ys = x.res
    xvals = {h: x.value(h) for h in range(len(ys.degrees[x.s]))}
    for g, tg in enumerate(res.degrees[s]):
        ent = f.entries(x.s, g)
        acc: dict = {}
        for h, terms in ent.items():
            th = ys.degrees[x.s][h]
            idx = z.indices(th - x.t)
            for k in np.flatnonzero(xvals[h]):
                for yy in z.act_sum(terms, idx[k]):
                    xor_into(acc, yy)
        for yy in acc:
            out[pos[(g, yy)]] ^= 1
    return ExtClass(s, t, res, z, out, name=f"{x.name}*{y.name}" if x.name and y.name else "")


def hi_class(res: Resolution, i: int) -> ExtClass:
    """h_i in Ext^{1,2^i}(F2, F2) for a resolution of F2."""
    return ext_class(res, 1, 1 << i, index=0, name=f"h{i}")


# ---------------------------------------------------------------------------
# cones


def mapping_cone(f: ChainMap, title: str = "") -> FreeChainComplex:
    """Complex C_s = P_s(X) + Sigma^b P_{s-a+1}(Y) with d(p, q) = (dp, f(p) + dq).

    Its Ext sits in the long exact sequence
    Ext^s(X) -> Ext^s(C) -> Ext^{s-a+1, t-b}(Y) -> Ext^{s+1}(X) (product with the class).
    """
    rx, ry, a, b = f.source, f.target, f.a, f.b
    s_top = min(rx.s_max, f.s_max + a, ry.s_max + a - 1)
    t_top = min(rx.t_max, ry.t_max + b)
    degrees, entries, labels = {}, {}, {}
    for s in range(0, s_top + 1):
        n_p = len(rx.degrees[s])
        qs = s - a + 1
        q_degs = [t + b for t in ry.degrees[qs]] if 0 <= qs <= ry.s_max else []
        degrees[s] = list(rx.degrees[s]) + q_degs
        labels[s] = [f"p[{s},{g}]" for g in range(n_p)] + [f"q[{qs},{h}]" for h in range(len(q_degs))]
        ents = []
        n_p_prev = len(rx.degrees[s - 1]) if s >= 1 else 0
        for g in range(n_p):
            e = dict(rx.entries(s, g)) if s >= 1 else {}
            j = s - a
            if 0 <= j <= f.s_max:
                for h, terms in f.entries(j, g).items():
                    e[n_p_prev + h] = terms
            ents.append(e)
        for h in range(len(q_degs)):
            e = {}
            if qs >= 1:
                for k, terms in ry.entries(qs, h).items():
                    e[n_p_prev + k] = terms
            ents.append(e)
        entries[s] = ents
    return FreeChainComplex(rx.slice, 0, s_top, t_top, degrees, entries, labels,
                            title=title or "cone")


def unit_coefficients(f: ChainMap, j: int, t: int) -> np.ndarray:
    """Matrix of y -> y . x from Ext^{j, t-b}(Y) to Ext^{a+j, t}(X) for minimal resolutions.

    Rows are generators of P_j(Y) in degree t - b, columns generators of
    P_{a+j}(X) in degree t; the entry is the unit coefficient in f_j.
    """
    rx, ry = f.source, f.target
    rows = ry.gens_at(j, t - f.b) if 0 <= j <= ry.s_max else []
    cols = rx.gens_at(f.a + j, t) if 0 <= f.a + j <= rx.s_max else []
    mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    if not rows or not cols or j > f.s_max:
        return mat
    starts, dims, ds, _ = ry.spaces[j].layout(t - f.b)
    for c, g in enumerate(cols):
        vec = f.images[j][g]
        for r, h in enumerate(rows):
            if ds[h] == 0 and vec[starts[h]]:
                mat[r, c] = 1
    return mat


@dataclass
class LesReport:
    checked: int
    mismatches: list

    @property
    def passed(self) -> bool:
        return not self.mismatches


def cone_les_check(f: ChainMap, cone_table: ExtTable) -> LesReport:
    """dim Ext^{s,t}(C) = dim coker(x : Ext^{s-a,t-b}(Y) -> Ext^{s,t}(X))
    + dim ker(x : Ext^{s-a+1,t-b}(Y) -> Ext^{s+1,t}(X)) on the cone's window."""
    rx = f.source
    bad = []
    n = 0
    for s in range(0, cone_table.s_max + 1):
        for t in range(rx.module.bottom, cone_table.t_max + 1):
            into = unit_coefficients(f, s - f.a, t)
            out_of = unit_coefficients(f, s - f.a + 1, t)
            dim_x = len(rx.gens_at(s, t))
            coker = dim_x - _rank(into)
            ker = out_of.shape[0] - _rank(out_of)
            expect = coker + ker
            got = cone_table.dim(s, t)
            n += 1
            if got != expect:
                bad.append((s, t, got, expect))
    return LesReport(n, bad)


def zero_chain_map(src: Resolution, tgt: Resolution, a: int, b: int) -> ChainMap:
    images = []
    maps = []
    for j in range(min(src.s_max - a, tgt.s_max) + 1):
        imgs = [np.zeros(tgt.spaces[j].dim(tg - b), dtype=np.uint8) for tg in src.degrees[a + j]]
        images.append(imgs)
        maps.append(FreeMap(src.spaces[a + j], tgt.spaces[j], imgs, shift=b))
    return ChainMap(a, b, src, tgt, images, maps)


# ---------------------------------------------------------------------------
# named classes


def select_v1_4(res: Resolution, threads: int = 1) -> ExtClass:
    """The unique nonzero class of Ext^{4,12}(X, X) for X = res.module; aborts otherwise."""
    eb = ext_basis(res, 4, 12, res.module)
    if eb.dim != 1:
        raise ResolutionError(f"Ext^{{4,12}}({res.module.name}, {res.module.name}) over "
                              f"{res.slice.key} has dimension {eb.dim}, not 1; v1^4 is not determined")
    return ExtClass(4, 12, res, res.module, eb.cocycles[0].copy(), "v1^4")


def named_class(name: str, res: Resolution) -> ExtClass:
    """Classes usable as cone maps: h0..h3 on F2, v1^4 on H1."""
    if name in ("h0", "h1", "h2", "h3"):
        i = int(name[1])
        return ExtClass(1, 1 << i, res, res.module, ext_basis(res, 1, 1 << i, res.module).cocycles[0].copy()
                        if res.module.dim == 1 else _fail(name), name)
    if name == "v1^4":
        return select_v1_4(res)
    raise ResolutionError(f"unknown class {name!r}")


def _fail(name: str):
    raise ResolutionError(f"class {name} is only defined on F2")


def realize(obj, s_max: int, t_max: int, threads: int = 1) -> tuple[FreeChainComplex, int, int]:
    """A free complex for a module or derived object, plus its (t, s) shifts.

    The complex computes Ext of the unshifted object; apply the shifts with
    ``ExtTable.reindexed``.
    """
    if isinstance(obj, GradedModule):
        return minimal_resolution(obj, s_max, t_max, threads=threads).as_complex(), 0, 0
    if isinstance(obj, Plain):
        cx, ts, ss = realize(obj.module, s_max, t_max, threads)
        return cx, ts + obj.t_shift, ss + obj.s_shift
    if isinstance(obj, Cone):
        if not isinstance(obj.source, Plain) or not isinstance(obj.target, Plain):
            raise ResolutionError("cones of cones are not supported")
        x_mod = obj.target.module
        y_mod = obj.source.module
        a, b = obj.s, obj.t
        rx = minimal_resolution(x_mod, s_max + 1, t_max, threads=threads)
        ry = rx if y_mod is x_mod else minimal_resolution(y_mod, s_max + 1, t_max, threads=threads)
        if obj.class_name == "zero":
            f = zero_chain_map(rx, ry, a, b)
        else:
            x = named_class(obj.class_name, rx)
            if (x.s, x.t) != (a, b):
                raise ResolutionError(f"{obj.class_name} has bidegree {(x.s, x.t)}, not {(a, b)}")
            f = lift_chain_map(x, ry)
        cx = mapping_cone(f, title=f"cone({obj.class_name})")
        return cx, obj.t_shift, obj.s_shift
    raise TypeError(f"cannot realize {obj!r}")


# Positional candidates for named classes (bidegree (s, t)); no May spectral sequence is run.
CANDIDATES = {
    ("A2", "F2"): {(1, 1): "h0", (1, 2): "h1", (1, 4): "h2", (3, 11): "candidate-c0",
                   (4, 12): "candidate-c4", (4, 18): "candidate-d0", (4, 21): "candidate-e0",
                   (4, 24): "candidate-g", (8, 56): "candidate-v2^8"},
    ("A2", "H14"): {(8, 56): "candidate-v2^8", (4, 24): "candidate-g"},
    ("A", "F2"): {(1, 1): "h0", (1, 2): "h1", (1, 4): "h2", (1, 8): "h3", (1, 16): "h4", (1, 32): "h5"},
}


def label_candidates(tab: ExtTable, algebra: str, name: str) -> ExtTable:
    """Attach candidate names where the bidegree is one-dimensional."""
    for key, lbl in CANDIDATES.get((algebra, name), {}).items():
        if tab.dim(*key) == 1:
            tab.labels[key] = [lbl]
    return tab


def ext_of(obj, s_max: int, t_max: int, threads: int = 1, w: Optional[GradedModule] = None,
           title: str = "") -> ExtTable:
    """Ext(W (x) obj, F2) (W optional) on the window, indexed for the shifted object."""
    cx, ts, ss = realize(obj, s_max, t_max, threads)
    if w is None:
        tab = cx.ext_table(title=title)
    else:
        tab = cx.tensor_ext(w, title=title)
    return tab.reindexed(ts, ss) if (ts or ss) else tab


def ext_between(m, n: GradedModule, s_max: int, t_max: int, threads: int = 1) -> ExtTable:
    """Ext^{s,t}(m, n) = H^s(Hom_A(P(m), Sigma^t n))."""
    cx, ts, ss = realize(m, s_max + 1, t_max, threads)
    tab = cx.hom_ext(n, title=f"Ext({getattr(m, 'name', 'X')},{n.name})")
    tab = tab.restricted(s_max, tab.t_max)
    return tab.reindexed(ts, ss) if (ts or ss) else tab


# ---------------------------------------------------------------------------
# the cobar oracle

ORACLE_CAP = 60000


def _gf2_rank_ints(rows: list[int]) -> int:
    piv: dict[int, int] = {}
    r = 0
    for v in rows:
        while v:
            h = v.bit_length() - 1
            p = piv.get(h)
            if p is None:
                piv[h] = v
                r += 1
                break
            v ^= p
    return r


def cobar_ext_oracle(m: ComodulePresentation, s_max: int, t_max: int, over: Optional[int],
                     cap: int = ORACLE_CAP) -> ExtTable:
    """Ext_Gamma(F2, M) from the reduced cobar complex Gamma-bar^{(x)s} (x) M.

    ``over=n`` uses Gamma = A(n)_*; ``over=None`` uses A_* in degrees <= t_max.
    Raises ResolutionError when a cochain group exceeds ``cap``.
    """
    if m.over is not None and (over is None or m.over < over):
        raise ResolutionError("the comodule is not defined over the requested Hopf algebra")
    from .brown_gitler import admissible_monomials

    span = t_max - min(m.degrees) if m.degrees else 0
    gamma: dict[int, list] = {}
    for e in admissible_monomials(-1, max(span, 0)):
        d = degree(e)
        if d == 0 or (over is not None and not in_quotient(e, over)):
            continue
        gamma.setdefault(d, []).append(e)

    def keep(l: Exps) -> bool:
        return over is None or in_quotient(l, over)

    dbar = {}
    for lst in gamma.values():
        for g in lst:
            dbar[g] = [(x, y) for x, y in xi_coproduct(g) if x and y and keep(x) and keep(y)]
    coact = []
    for terms in m.coaction:
        coact.append([(l, b) for l, b in terms if l and keep(l)])
    by_deg: dict[int, list[int]] = {}
    for k, d in enumerate(m.degrees):
        by_deg.setdefault(d, []).append(k)

    memo: dict = {}

    def tuples(s: int, t: int) -> list:
        key = (s, t)
        got = memo.get(key)
        if got is not None:
            return got
        if s == 0:
            got = [((), b) for b in by_deg.get(t, [])]
        else:
            got = []
            for d in sorted(gamma):
                if d > t - (min(m.degrees) if m.degrees else 0):
                    break
                for g in gamma[d]:
                    for rest, b in tuples(s - 1, t - d):
                        got.append(((g,) + rest, b))
        if len(got) > cap:
            raise ResolutionError(f"cobar cochains C^{{{s},{t}}} have dimension {len(got)} > cap {cap}")
        memo[key] = got
        return got

    tab = ExtTable(s_max, t_max, title="cobar")
    if not m.degrees:
        return tab
    for t in range(min(m.degrees), t_max + 1):
        ranks = {}
        for s in range(0, s_max + 1):
            src = tuples(s, t)
            if not src:
                ranks[s] = 0
                continue
            tgt = tuples(s + 1, t)
            idx = {x: k for k, x in enumerate(tgt)}
            rows = []
            for gs, b in src:
                v = 0
                for i, g in enumerate(gs):
                    for x, y in dbar[g]:
                        v ^= 1 << idx[(gs[:i] + (x, y) + gs[i + 1:], b)]
                for l, c in coact[b]:
                    v ^= 1 << idx[(gs + (l,), c)]
                rows.append(v)
            ranks[s] = _gf2_rank_ints(rows)
        for s in range(0, s_max + 1):
            v = len(tuples(s, t)) - ranks[s] - (ranks[s - 1] if s else 0)
            if v:
                tab.dims[(s, t)] = v
    return tab


# ---------------------------------------------------------------------------
# facts about Ext_A(H1) near (s, t) = (9, 56)


@dataclass
class FactReport:
    name: str
    passed: bool
    detail: str


def prop43_facts(threads: int = 1, s_max: int = 10, t_max: int = 58) -> list[FactReport]:
    """Ext^{9,56}(H1) = 0; h0 kills Ext^{5,44}(H1); h0 maps Ext^{8,56} onto Ext^{9,57}."""
    from .steenrod import get_slice

    sl = get_slice("A", t_max)
    h1 = builtin("H1", sl)
    res = minimal_resolution(h1, s_max, t_max, threads=threads, keep_matrices=False)
    tab = res.ext_table()
    out = []
    d956 = tab.dim(9, 56)
    out.append(FactReport("Ext^{9,56}(H1) = 0", d956 == 0, f"dim = {d956}"))
    m = res.hi_matrix(0, 5, 44)
    out.append(FactReport("h0 x = 0 for x in Ext^{5,44}(H1)", not m.any(),
                          f"dim Ext^{{5,44}} = {m.shape[0]}, rank of h0 = {_rank(m)}"))
    m2 = res.hi_matrix(0, 8, 56)
    target = tab.dim(9, 57)
    out.append(FactReport("h0 : Ext^{8,56}(H1) -> Ext^{9,57}(H1) onto", _rank(m2) == target,
                          f"rank {_rank(m2)} of {target}"))
    return out


def h0cubed_h3_h5(threads: int = 1, s_max: int = 7, t_max: int = 45) -> dict:
    """h0^3 h3 h5 in Ext^{5,43}(F2) over the full algebra and its h0 multiple."""
    from .steenrod import get_slice

    sl = get_slice("A", t_max)
    res = minimal_resolution(builtin("F2", sl), s_max, t_max, threads=threads, keep_matrices=False)
    h5 = np.ones(len(res.gens_at(1, 32)), dtype=np.uint8)
    if len(h5) != 1:
        raise ResolutionError("Ext^{1,32} should be one-dimensional")
    x = res.hi_times(3, 1, 32, h5)
    s, t = 2, 40
    for _ in range(3):
        x = res.hi_times(0, s, t, x)
        s, t = s + 1, t + 1
    y = res.hi_times(0, s, t, x)
    return {"class": x, "nonzero": bool(x.any()), "h0_times": y, "killed_by_h0": not y.any(),
            "bidegree": (s, t), "resolution": res}
