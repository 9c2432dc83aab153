"""Finite graded modules over an algebra slice, their comodule duals, and derived objects.

A comodule ``M`` with left coaction ``psi(m) = sum a (x) m'`` determines the
module on the linear dual ``M^v`` (same degrees) by

    Sq(R) . f_b = sum over m with xi^R (x) b in psi(m) of f_m,

and ``Ext_{A_*}(F2, M) = Ext_A(M^v, F2)``.  All named objects are built this way.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .f2linalg import mat_mul
from .steenrod import (
    AlgebraSlice,
    Exps,
    Sum,
    add_exps,
    degree,
    format_sq,
    get_slice,
    in_quotient,
    xi_coproduct,
    xor_into,
)


class ModuleError(ValueError):
    """A module table violates unit, degree, or associativity constraints."""


# ---------------------------------------------------------------------------
# comodules

@dataclass(frozen=True)
class ComodulePresentation:
    """Left comodule over A_* (``over=None``) or over the quotient A(n)_* (``over=n``).

    ``coaction[i]`` is a sorted tuple of ``(left exponents, basis index)``.
    """

    labels: tuple
    degrees: tuple
    coaction: tuple
    over: Optional[int] = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def check(self) -> None:
        """Raise ModuleError unless the coaction is counital, graded and coassociative."""
        n = self.over
        for i, terms in enumerate(self.coaction):
            units = [b for l, b in terms if l == ()]
            if units != [i]:
                raise ModuleError(f"counit fails on {self.labels[i]}")
            for l, b in terms:
                if degree(l) + self.degrees[b] != self.degrees[i]:
                    raise ModuleError(f"coaction term on {self.labels[i]} is not homogeneous")
                if n is not None and not in_quotient(l, n):
                    raise ModuleError("left factor outside the quotient Hopf algebra")
        for i, terms in enumerate(self.coaction):
            lhs: dict = {}
            for l, b in terms:
                for l1, l2 in xi_coproduct(l):
                    if n is None or (in_quotient(l1, n) and in_quotient(l2, n)):
                        xor_into(lhs, (l1, l2, b))
            rhs: dict = {}
            for l, b in terms:
                for l2, c in self.coaction[b]:
                    xor_into(rhs, (l, l2, c))
            if lhs.keys() != rhs.keys():
                raise ModuleError(f"coassociativity fails on {self.labels[i]}")

    def restrict(self, n: int) -> "ComodulePresentation":
        if self.over is not None and self.over < n:
            raise ValueError(f"cannot view an A({self.over})_*-comodule over A({n})_*")
        co = tuple(tuple(t for t in terms if in_quotient(t[0], n)) for terms in self.coaction)
        return ComodulePresentation(self.labels, self.degrees, co, n)

    def shift(self, t: int) -> "ComodulePresentation":
        return replace(self, degrees=tuple(d + t for d in self.degrees))


def trivial_comodule(degree_: int = 0, label: str = "1") -> ComodulePresentation:
    return ComodulePresentation((label,), (degree_,), ((((), 0),),))


def comodule_tensor(a: ComodulePresentation, b: ComodulePresentation) -> ComodulePresentation:
    over = _meet(a.over, b.over)
    labels, degrees, index = [], [], {}
    for i in range(a.dim):
        for j in range(b.dim):
            index[(i, j)] = len(labels)
            labels.append(_pair_label(a.labels[i], b.labels[j]))
            degrees.append(a.degrees[i] + b.degrees[j])
    co = []
    for i in range(a.dim):
        for j in range(b.dim):
            acc: dict = {}
            for la, x in a.coaction[i]:
                for lb, y in b.coaction[j]:
                    l = add_exps(la, lb)
                    l = tuple(l)
                    while l and l[-1] == 0:
                        l = l[:-1]
                    if over is None or in_quotient(l, over):
                        xor_into(acc, (l, index[(x, y)]))
            co.append(tuple(sorted(acc)))
    return ComodulePresentation(tuple(labels), tuple(degrees), tuple(co), over)


def _meet(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _pair_label(x: str, y: str) -> str:
    if x == "1":
        return y
    if y == "1":
        return x
    return f"{x}*{y}"


# ---------------------------------------------------------------------------
# modules

class GradedModule:
    """Finite-dimensional graded left module over an algebra slice.

    ``action`` maps a Milnor exponent tuple of positive degree to a dense
    ``dim x dim`` 0/1 matrix whose row ``i`` lists ``Sq(R) . e_i``; zero
    operations are omitted and Sq(0) is the identity.
    """

    def __init__(self, slice_: AlgebraSlice, labels: Sequence[str], degrees: Sequence[int],
                 action: dict, name: str = ""):
        self.slice = slice_
        self.labels = tuple(labels)
        self.degrees = tuple(int(d) for d in degrees)
        self.name = name
        if len(set(self.labels)) != len(self.labels):
            raise ModuleError("basis labels must be distinct")
        self.action = {}
        for r, mat in action.items():
            if r == ():
                continue
            mat = np.asarray(mat, dtype=np.uint8) & 1
            if mat.any():
                mat.setflags(write=False)
                self.action[r] = mat
        self._by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            self._by_degree.setdefault(d, []).append(i)
        self._pos = {}
        for d, idx in self._by_degree.items():
            for p, i in enumerate(idx):
                self._pos[i] = p
        self._blocks: dict = {}

    # -- shape ----------------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def bottom(self) -> int:
        return min(self.degrees) if self.degrees else 0

    @property
    def top(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def indices(self, d: int) -> list[int]:
        return self._by_degree.get(d, [])

    def dim_in(self, d: int) -> int:
        return len(self._by_degree.get(d, ()))

    def position(self, i: int) -> int:
        """Position of basis element ``i`` within its degree."""
        return self._pos[i]

    def dims_by_degree(self) -> dict[int, int]:
        return {d: len(v) for d, v in sorted(self._by_degree.items())}

    def __repr__(self) -> str:
        nm = self.name or "module"
        return f"GradedModule({nm}, {self.slice.key}, dims={self.dims_by_degree()})"

    # -- action ---------------------------------------------------------------
    def matrix(self, r: Exps) -> np.ndarray:
        if r == ():
            return np.eye(self.dim, dtype=np.uint8)
        got = self.action.get(r)
        if got is None:
            return np.zeros((self.dim, self.dim), dtype=np.uint8)
        return got

    def act(self, r: Exps, i: int) -> tuple:
        if r == ():
            return (i,)
        mat = self.action.get(r)
        if mat is None:
            return ()
        return tuple(int(j) for j in np.flatnonzero(mat[i]))

    def act_sum(self, terms: Sum, i: int) -> tuple:
        acc: dict = {}
        for r in terms:
            for j in self.act(r, i):
                xor_into(acc, j)
        return tuple(sorted(acc))

    def block(self, r: Exps, d: int) -> np.ndarray:
        """Action of Sq(r) from degree d to degree d + |r| in per-degree coordinates."""
        key = (r, d)
        got = self._blocks.get(key)
        if got is None:
            src = self.indices(d)
            tgt = self.indices(d + degree(r))
            got = self.matrix(r)[np.ix_(src, tgt)] if src and tgt else np.zeros((len(src), len(tgt)), np.uint8)
            got = np.ascontiguousarray(got)
            self._blocks[key] = got
        return got

    def sum_block(self, terms: Sum, d: int, out_degree: int) -> np.ndarray:
        out = np.zeros((self.dim_in(d), self.dim_in(out_degree)), dtype=np.uint8)
        for r in terms:
            out ^= self.block(r, d)
        return out

    # -- checks -----------------------------------------------------------------
    def validate(self, samples: Optional[int] = None, seed: int = 0) -> None:
        """Check unit, degree compatibility and associativity.

        Finite slices are checked on every pair of basis elements; the
        truncated full algebra (or an explicit ``samples``) uses a seeded
        random sample of pairs.
        """
        sl = self.slice
        span = self.top - self.bottom
        for r, mat in self.action.items():
            if not sl.contains(r):
                raise ModuleError(f"{format_sq(r)} is not in {sl.key}")
            dr = degree(r)
            for i, j in zip(*np.nonzero(mat)):
                if self.degrees[j] != self.degrees[i] + dr:
                    raise ModuleError(f"{format_sq(r)} on {self.labels[i]} breaks degrees")
        if self.dim == 0:
            return
        elems = [x for d in range(1, span + 1) for x in sl.basis(d)] if span > 0 else []
        pairs = [(a, b) for a in elems for b in elems if degree(a) + degree(b) <= span]
        if samples is None and not sl.is_finite:
            samples = 400
        if samples is not None and len(pairs) > samples:
            rng = random.Random(seed)
            pairs = rng.sample(pairs, samples)
        for a, b in pairs:
            lhs = np.zeros((self.dim, self.dim), dtype=np.uint8)
            for c in sl.product(a, b):
                lhs ^= self.matrix(c)
            # row i of matrix(b) @ matrix(a) is a.(b.e_i)
            rhs = mat_mul(self.matrix(b), self.matrix(a))
            if not np.array_equal(lhs, rhs):
                raise ModuleError(
                    f"associativity fails for {format_sq(a)} * {format_sq(b)} in {self.name or 'module'}")

    # -- constructions --------------------------------------------------------------
    def shift(self, t: int) -> "GradedModule":
        return GradedModule(self.slice, self.labels, [d + t for d in self.degrees], self.action,
                            name=f"S^{t}{self.name}" if t else self.name)

    def restrict(self, target: AlgebraSlice) -> "GradedModule":
        return restrict(self, target)

    def relabel(self, labels: Sequence[str], name: str = "") -> "GradedModule":
        return GradedModule(self.slice, labels, self.degrees, self.action, name or self.name)


def module_from_comodule(c: ComodulePresentation, slice_: AlgebraSlice, name: str = "") -> GradedModule:
    """The linear dual of a comodule, as a module over ``slice_``."""
    if slice_.is_finite:
        if c.over is not None and c.over < slice_.n:
            raise ValueError(f"an A({c.over})_*-comodule is not a module over {slice_.key}")
    else:
        if c.over is not None:
            raise ValueError(f"an A({c.over})_*-comodule is not a module over the full algebra")
        span = (max(c.degrees) - min(c.degrees)) if c.degrees else 0
        if span > slice_.t_max:
            raise ValueError(f"module spans {span} degrees, beyond t_max={slice_.t_max}")
    n = c.dim
    action: dict = {}
    for m, terms in enumerate(c.coaction):
        for l, b in terms:
            if l == () or not slice_.contains(l):
                continue
            mat = action.get(l)
            if mat is None:
                mat = action[l] = np.zeros((n, n), dtype=np.uint8)
            mat[b, m] ^= 1
    return GradedModule(slice_, c.labels, c.degrees, action, name=name)


def tensor(m: GradedModule, n: GradedModule, name: str = "") -> GradedModule:
    """Tensor product with the Cartan action Sq(R)(x y) = sum_{R'+R''=R} Sq(R')x Sq(R'')y."""
    if m.slice != n.slice:
        raise ValueError("tensor factors must be over the same slice")
    sl = m.slice
    dm, dn = m.dim, n.dim
    labels = [_pair_label(a, b) for a in m.labels for b in n.labels]
    degrees = [x + y for x in m.degrees for y in n.degrees]
    span = (max(degrees) - min(degrees)) if degrees else 0
    action: dict = {}
    for d in range(1, span + 1):
        for r in sl.basis(d):
            mat = np.zeros((dm * dn, dm * dn), dtype=np.uint8)
            for r1, r2 in sl.coproduct(r):
                a = m.matrix(r1)
                b = n.matrix(r2)
                if not a.any() or not b.any():
                    continue
                mat ^= np.kron(a, b)
            if mat.any():
                action[r] = mat
    return GradedModule(sl, labels, degrees, action, name=name or f"{m.name}*{n.name}")


def tensor_power(m: GradedModule, k: int) -> GradedModule:
    if k < 1:
        raise ValueError("tensor power needs k >= 1")
    out = m
    for _ in range(k - 1):
        out = tensor(out, m)
    return out.relabel(out.labels, name=f"{m.name}^{k}")


def dualize(m: GradedModule) -> GradedModule:
    """Dual module: degrees negated, Sq(R) acting by the transpose of its conjugate."""
    sl = m.slice
    labels = [lab if lab == "1" else (lab[:-1] if lab.endswith("'") else lab + "'") for lab in m.labels]
    span = m.top - m.bottom
    action: dict = {}
    for d in range(1, span + 1):
        for r in sl.basis(d):
            mat = np.zeros((m.dim, m.dim), dtype=np.uint8)
            for c in sl.conjugate(r):
                mat ^= m.matrix(c)
            if mat.any():
                action[r] = mat.T.copy()
    name = m.name[1:] if m.name.startswith("D") and m.name[1:] else "D" + m.name
    return GradedModule(sl, labels, [-d for d in m.degrees], action, name=name)


def restrict(m: GradedModule, target: AlgebraSlice) -> GradedModule:
    src = m.slice
    if src.is_finite:
        if not target.is_finite or target.n > src.n:
            raise ValueError(f"{target.key} is not a subalgebra of {src.key}")
    elif not target.is_finite and target.t_max > src.t_max:
        raise ValueError("target truncation exceeds the source truncation")
    action = {r: mat for r, mat in m.action.items() if target.contains(r)}
    return GradedModule(target, m.labels, m.degrees, action, name=m.name)


def direct_sum(m: GradedModule, n: GradedModule, name: str = "") -> GradedModule:
    if m.slice != n.slice:
        raise ValueError("summands must be over the same slice")
    dim = m.dim + n.dim
    action = {}
    for r in set(m.action) | set(n.action):
        mat = np.zeros((dim, dim), dtype=np.uint8)
        mat[: m.dim, : m.dim] = m.matrix(r)
        mat[m.dim :, m.dim :] = n.matrix(r)
        action[r] = mat
    return GradedModule(m.slice, list(m.labels) + list(n.labels), list(m.degrees) + list(n.degrees),
                        action, name=name)


def complete_action(slice_: AlgebraSlice, labels: Sequence[str], degrees: Sequence[int],
                    generator_action: dict, name: str = "") -> GradedModule:
    """Build the full table from the actions of the algebra generators Sq(2^k).

    ``generator_action[k]`` is a ``dim x dim`` matrix for Sq(2^k).  Each Milnor
    element is expanded in the generator-product basis of its degree; the
    result is validated, so an inconsistent (non-Adem) input raises.
    """
    dim = len(labels)
    span = (max(degrees) - min(degrees)) if degrees else 0
    gens = {k: np.asarray(generator_action.get(k, np.zeros((dim, dim))), dtype=np.uint8) & 1
            for d in slice_.generator_degrees() for k in [d.bit_length() - 1]}
    for k in generator_action:
        if k not in gens:
            raise ModuleError(f"Sq^{1 << k} is not a generator of {slice_.key}")
    # generator-product basis action, per degree
    bmats: dict[int, list[np.ndarray]] = {0: [np.eye(dim, dtype=np.uint8)]}
    action: dict = {}
    for d in range(1, span + 1):
        recipe, _, from_m = slice_.generator_basis(d)
        mats = []
        for k, j in recipe:
            # (Sq(2^k) b) . v = Sq(2^k) . (b . v): row-vector convention
            mats.append(mat_mul(bmats[d - (1 << k)][j], gens[k]))
        bmats[d] = mats
        for ri, r in enumerate(slice_.basis(d)):
            mat = np.zeros((dim, dim), dtype=np.uint8)
            for i in np.flatnonzero(from_m[ri]):
                mat ^= mats[i]
            if mat.any():
                action[r] = mat
    mod = GradedModule(slice_, labels, degrees, action, name=name)
    for k, g in gens.items():
        if not np.array_equal(mod.matrix((1 << k,)), g):
            raise ModuleError(f"Sq^{1 << k} table is inconsistent with the other generators")
    mod.validate()
    return mod


# ---------------------------------------------------------------------------
# module definition files

_GEN = re.compile(r"^gen\s+(\S+)\s+(-?\d+)$")
_ACT = re.compile(r"^act\s+Sq\^(\d+)\s+(\S+)\s*=\s*(.+)$")


def loads_module(text: str, slice_: AlgebraSlice, name: str = "") -> GradedModule:
    labels, degrees, acts = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _GEN.match(line)
        if m:
            labels.append(m.group(1))
            degrees.append(int(m.group(2)))
            continue
        m = _ACT.match(line)
        if m:
            acts.append((lineno, int(m.group(1)), m.group(2), m.group(3)))
            continue
        raise ModuleError(f"line {lineno}: cannot parse {raw!r}")
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise ModuleError("duplicate generator label")
    dim = len(labels)
    gen_action: dict = {}
    for lineno, n, src, rhs in acts:
        if n <= 0 or n & (n - 1):
            raise ModuleError(f"line {lineno}: Sq^{n} is not Sq^(2^k)")
        k = n.bit_length() - 1
        if src not in index:
            raise ModuleError(f"line {lineno}: unknown generator {src}")
        mat = gen_action.setdefault(k, np.zeros((dim, dim), dtype=np.uint8))
        for tok in rhs.split("+"):
            tok = tok.strip()
            if tok == "0":
                continue
            if tok not in index:
                raise ModuleError(f"line {lineno}: unknown generator {tok}")
            if degrees[index[tok]] != degrees[index[src]] + n:
                raise ModuleError(f"line {lineno}: Sq^{n} {src} = {tok} breaks degrees")
            mat[index[src], index[tok]] ^= 1
    return complete_action(slice_, labels, degrees, gen_action, name=name)


def dumps_module(m: GradedModule) -> str:
    lines = [f"gen {lab} {deg}" for lab, deg in zip(m.labels, m.degrees)]
    for i, lab in enumerate(m.labels):
        for gdeg in m.slice.generator_degrees():
            tgt = m.act((gdeg,), i)
            if tgt:
                lines.append(f"act Sq^{gdeg} {lab} = " + " + ".join(m.labels[j] for j in tgt))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# derived objects

@dataclass(frozen=True)
class Plain:
    """A module placed at internal shift ``t_shift`` and homological shift ``s_shift``."""

    module: GradedModule
    t_shift: int = 0
    s_shift: int = 0


@dataclass(frozen=True)
class Cone:
    """Cofiber of an Ext class ``source -> target`` of bidegree (s, t).

    ``class_name`` names the class; the resolution engine realizes it.
    """

    class_name: str
    s: int
    t: int
    source: "DerivedObject"
    target: "DerivedObject"
    t_shift: int = 0
    s_shift: int = 0

    @property
    def slice(self) -> AlgebraSlice:
        return base_module(self.target).slice


DerivedObject = Union[Plain, Cone]


def base_module(x: "DerivedObject") -> GradedModule:
    while isinstance(x, Cone):
        x = x.target
    return x.module


def suspend_shift(x: Union[GradedModule, "DerivedObject"], t: int, s: int) -> "DerivedObject":
    """Sigma^t x [s]; Ext^{a,b}(Sigma^t x [s]) = Ext^{a+s, b-t}(x)."""
    if isinstance(x, GradedModule):
        x = Plain(x)
    return replace(x, t_shift=x.t_shift + t, s_shift=x.s_shift + s)


def reindex(dims: dict, t_shift: int, s_shift: int) -> dict:
    """Move an Ext table of x to the table of Sigma^t_shift x [s_shift]."""
    return {(s - s_shift, t + t_shift): v for (s, t), v in dims.items()}


# ---------------------------------------------------------------------------
# named objects

def h1_comodule() -> ComodulePresentation:
    return ComodulePresentation(("x0", "x1"), (0, 1), ((((), 0),), (((), 1), ((1,), 0))))


def ceta_comodule() -> ComodulePresentation:
    return ComodulePresentation(("y0", "y2"), (0, 2), ((((), 0),), (((), 1), ((2,), 0))))


BUILTINS = ("F2", "H1", "DH1", "H14", "DH14", "M21", "H1xDH1", "Ceta", "N11")


def builtin(name: str, slice_: Optional[AlgebraSlice] = None):
    """The named modules and derived objects, over ``slice_`` (default A(2))."""
    sl = slice_ if slice_ is not None else get_slice("A2")
    if name == "F2":
        return module_from_comodule(trivial_comodule(), sl, name="F2")
    if name == "H1":
        return module_from_comodule(h1_comodule(), sl, name="H1")
    if name == "DH1":
        return dualize(builtin("H1", sl))
    if name == "H1xDH1":
        return tensor(builtin("H1", sl), builtin("DH1", sl), name="H1xDH1")
    if name == "Ceta":
        return module_from_comodule(ceta_comodule(), sl, name="Ceta")
    if name in ("M21", "N11"):
        from .brown_gitler import m_comodule, n_comodule

        c = (m_comodule(2, 1) if name == "M21" else n_comodule(1, 1)).comodule
        if not sl.is_finite and name == "M21":
            raise ValueError("M_2(1) is only an A(2)_*-comodule")
        if sl.is_finite and sl.n > 2 and name == "M21":
            raise ValueError("M_2(1) is only an A(2)_*-comodule")
        return module_from_comodule(c, sl, name=name)
    if name == "H14":
        h1 = builtin("H1", sl)
        return Cone("v1^4", 4, 12, Plain(h1, 12, -4), Plain(h1))
    if name == "DH14":
        return suspend_shift(builtin("H14", sl), -13, 3)
    raise KeyError(f"unknown builtin {name!r}; expected one of {', '.join(BUILTINS)}")
