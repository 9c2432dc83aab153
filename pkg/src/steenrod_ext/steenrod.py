"""Milnor-basis arithmetic for the mod 2 Steenrod algebra and its slices.

Everything is written in conjugate coordinates: the dual Steenrod algebra is
the polynomial algebra on the conjugate generators ``xi_k`` with coproduct

    psi(xi_k) = sum_{i + j = k} xi_i (x) xi_j^(2^i),

and ``Sq(r1, r2, ...)`` is the basis element dual to the monomial
``xi1^r1 xi2^r2 ...``.  Products in the algebra are dual to this coproduct.

Exponent sequences are plain tuples with trailing zeros trimmed; a formal sum
is a sorted tuple of distinct terms (coefficients are mod 2).
"""

from __future__ import annotations

import re
import threading
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .f2linalg import mat_mul

Exps = tuple  # trimmed exponent sequence
Sum = tuple  # sorted tuple of distinct terms


def trim(seq: Iterable[int]) -> Exps:
    seq = list(seq)
    while seq and seq[-1] == 0:
        seq.pop()
    return tuple(seq)


def degree(exps: Exps) -> int:
    return sum(r * ((1 << (i + 1)) - 1) for i, r in enumerate(exps))


def weight(exps: Exps) -> int:
    """Brown-Gitler weight: ``xi_j`` has weight ``2^(j-1)``."""
    return sum(e << i for i, e in enumerate(exps))


def add_exps(a: Exps, b: Exps) -> Exps:
    n = max(len(a), len(b))
    return tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def xor_into(acc: dict, key) -> None:
    if key in acc:
        del acc[key]
    else:
        acc[key] = None


def as_sum(keys: Iterable) -> Sum:
    acc: dict = {}
    for k in keys:
        xor_into(acc, k)
    return tuple(sorted(acc))


# ---------------------------------------------------------------------------
# text rendering

def format_sq(r: Exps) -> str:
    return "Sq(" + ",".join(str(x) for x in (r or (0,))) + ")"


def format_xi(e: Exps) -> str:
    parts = [f"xi{k + 1}^{x}" for k, x in enumerate(e) if x]
    return " ".join(parts) if parts else "1"


def format_sum(terms: Sum, fmt=format_sq) -> str:
    return " + ".join(fmt(t) for t in terms) if terms else "0"


_SQ_RE = re.compile(r"^\s*Sq\(\s*([0-9,\s]*)\)\s*$")
_XI_RE = re.compile(r"^xi(\d+)\^(\d+)$")


def parse_sq(text: str) -> Exps:
    m = _SQ_RE.match(text)
    if not m:
        raise ValueError(f"not a Milnor basis element: {text!r}")
    body = m.group(1).strip()
    return trim(int(x) for x in body.split(",")) if body else ()


def parse_xi(text: str) -> Exps:
    text = text.strip()
    if text == "1":
        return ()
    exps: dict[int, int] = {}
    for tok in text.split():
        m = _XI_RE.match(tok)
        if not m:
            raise ValueError(f"bad monomial factor {tok!r}")
        k, e = int(m.group(1)), int(m.group(2))
        if k < 1:
            raise ValueError("generator index starts at 1")
        exps[k] = exps.get(k, 0) + e
    n = max(exps) if exps else 0
    return trim(exps.get(k, 0) for k in range(1, n + 1))


# ---------------------------------------------------------------------------
# the dual algebra A_* in conjugate coordinates

@lru_cache(maxsize=None)
def _psi_generator_power(k: int, l: int) -> Sum:
    """psi(xi_k^(2^l)) as a sum of (left, right) exponent pairs."""
    terms = []
    for i in range(k + 1):
        j = k - i
        left = trim([0] * (i - 1) + [1 << l]) if i else ()
        right = trim([0] * (j - 1) + [1 << (i + l)]) if j else ()
        terms.append((left, right))
    return as_sum(terms)


def _tensor_mul(a: Sum, b: Sum) -> Sum:
    acc: dict = {}
    for la, ra in a:
        for lb, rb in b:
            xor_into(acc, (add_exps(la, lb), add_exps(ra, rb)))
    return tuple(sorted(acc))


@lru_cache(maxsize=None)
def xi_coproduct(e: Exps) -> Sum:
    """Full coproduct of a monomial of A_*, multiplicatively extended."""
    out: Sum = (((), ()),)
    for k, x in enumerate(e, start=1):
        l = 0
        while x:
            if x & 1:
                out = _tensor_mul(out, _psi_generator_power(k, l))
            x >>= 1
            l += 1
    return out


def poly_mul(a: Sum, b: Sum) -> Sum:
    acc: dict = {}
    for x in a:
        for y in b:
            xor_into(acc, add_exps(x, y))
    return tuple(sorted(acc))


def poly_square(a: Sum) -> Sum:
    return tuple(sorted(tuple(2 * x for x in m) for m in a))


@lru_cache(maxsize=None)
def xi_antipode_generator(k: int) -> Sum:
    """Conjugation of ``xi_k`` (i.e. the un-barred Milnor generator) as a polynomial in the ``xi``.

    From sum_{i+j=k} xi_i * chi(xi_j)^(2^i) = 0.
    """
    if k == 0:
        return ((),)
    acc: dict = {}
    for i in range(1, k + 1):
        term = xi_antipode_generator(k - i)
        for _ in range(i):
            term = poly_square(term)
        gen = trim([0] * (i - 1) + [1])
        for m in poly_mul(((gen),), term):
            xor_into(acc, m)
    return tuple(sorted(acc))


@lru_cache(maxsize=None)
def xi_antipode(e: Exps) -> Sum:
    out: Sum = ((),)
    for k, x in enumerate(e, start=1):
        base = xi_antipode_generator(k)
        l = 0
        while x:
            if x & 1:
                p = base
                for _ in range(l):
                    p = poly_square(p)
                out = poly_mul(out, p)
            x >>= 1
            l += 1
    return out


# ---------------------------------------------------------------------------
# Milnor product

def _disjoint_bits(vals: list[int]) -> bool:
    seen = 0
    for v in vals:
        if seen & v:
            return False
        seen |= v
    return True


def _milnor_matrix_product(r: Exps, s: Exps) -> Sum:
    """Milnor's matrix formula for the product dual to the un-barred coproduct.

    Entries along each diagonal must have disjoint binary digits (the
    multinomial coefficient is odd exactly then); the search prunes as soon
    as a diagonal clashes.
    """
    rows, cols = len(r), len(s)
    if rows == 0:
        return (s,)
    if cols == 0:
        return (r,)
    col_left = list(s)
    acc = [0] * (rows + cols + 1)
    found: dict = {}

    def finish() -> None:
        t = list(acc[1:])
        for j in range(1, cols + 1):
            v = col_left[j - 1]
            if v & t[j - 1]:
                return
            t[j - 1] |= v
        xor_into(found, trim(t))

    def fill(i: int, j: int, rem: int) -> None:
        if j == 0:
            if rem & acc[i]:
                return
            acc[i] |= rem
            if i == rows:
                finish()
            else:
                fill(i + 1, cols, r[i])
            acc[i] ^= rem
            return
        n = i + j
        top = min(rem >> j, col_left[j - 1])
        for v in range(top + 1):
            if v & acc[n]:
                continue
            acc[n] |= v
            col_left[j - 1] -= v
            fill(i, j - 1, rem - (v << j))
            col_left[j - 1] += v
            acc[n] ^= v

    fill(1, cols, r[0])
    return tuple(sorted(found))


@lru_cache(maxsize=None)
def _full_product(a: Exps, b: Exps) -> Sum:
    # conjugate coordinates swap the tensor factors of Milnor's coproduct,
    # so the barred product is Milnor's formula with the arguments reversed
    return _milnor_matrix_product(b, a)


# ---------------------------------------------------------------------------
# slices

class AlgebraSlice:
    """A(n) for small n, or the full algebra truncated at internal degree ``t_max``.

    The slice is immutable; per-degree tables are memoized behind a lock so
    concurrent first requests see one consistent result.
    """

    def __init__(self, n: Optional[int] = None, t_max: Optional[int] = None):
        if n is None and t_max is None:
            raise ValueError("the full algebra needs an explicit degree cap t_max")
        if n is not None and n < 0:
            raise ValueError("A(n) needs n >= 0")
        self.n = n
        self.t_max = t_max if n is None else self._top_degree(n)
        self._lock = threading.RLock()
        self._basis: dict[int, tuple] = {}
        self._index: dict[int, dict] = {}
        self._cache: dict = {}

    # -- identity ------------------------------------------------------------
    @property
    def name(self) -> str:
        return f"A{self.n}" if self.n is not None else "A"

    @property
    def key(self) -> str:
        return self.name if self.n is not None else f"A<={self.t_max}"

    def __repr__(self) -> str:
        return f"AlgebraSlice({self.key})"

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraSlice) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def is_finite(self) -> bool:
        return self.n is not None

    @staticmethod
    def _top_degree(n: int) -> int:
        return degree(tuple((1 << (n + 2 - i)) - 1 for i in range(1, n + 2)))

    def profile_bound(self, i: int) -> Optional[int]:
        """Strict upper bound on the i-th exponent (1-based), None if unbounded."""
        if self.n is None:
            return None
        return (1 << (self.n + 2 - i)) if i <= self.n + 1 else 1

    def contains(self, r: Exps) -> bool:
        if self.n is not None:
            return all(x < self.profile_bound(i) for i, x in enumerate(r, start=1))
        return degree(r) <= self.t_max

    def generator_degrees(self) -> list[int]:
        """Degrees 2^k of the algebra generators Sq(2^k) in this slice."""
        out = []
        k = 0
        while True:
            d = 1 << k
            if self.n is not None and k > self.n:
                break
            if self.n is None and d > self.t_max:
                break
            out.append(d)
            k += 1
        return out

    # -- basis ----------------------------------------------------------------
    def basis(self, d: int) -> tuple:
        """Milnor basis in degree d, sorted lexicographically."""
        if d < 0:
            return ()
        if self.n is None and d > self.t_max:
            raise ValueError(f"degree {d} beyond the truncation t_max={self.t_max}")
        got = self._basis.get(d)
        if got is not None:
            return got
        with self._lock:
            got = self._basis.get(d)
            if got is None:
                got = tuple(sorted(self._enumerate(d)))
                self._index[d] = {r: i for i, r in enumerate(got)}
                self._basis[d] = got
        return got

    def _enumerate(self, d: int) -> list:
        out = []
        top = 1
        while (1 << (top + 1)) - 1 <= d:
            top += 1

        def rec(i: int, rem: int, acc: list) -> None:
            if i == 0:
                if rem == 0:
                    out.append(trim(reversed(acc)))
                return
            w = (1 << i) - 1
            bound = rem // w
            pb = self.profile_bound(i)
            if pb is not None:
                bound = min(bound, pb - 1)
            for v in range(bound, -1, -1):
                acc.append(v)
                rec(i - 1, rem - v * w, acc)
                acc.pop()

        rec(top, d, [])
        return out

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def index(self, r: Exps) -> int:
        d = degree(r)
        self.basis(d)
        return self._index[d][r]

    def all_elements(self) -> list:
        """Every basis element of a finite slice, by degree then lexicographically."""
        if self.n is None:
            raise ValueError("the truncated full algebra has no finite total basis listing; use basis(d)")
        return [r for d in range(self.t_max + 1) for r in self.basis(d)]

    # -- products ---------------------------------------------------------------
    def product(self, a: Exps, b: Exps) -> Sum:
        if not (self.contains(a) and self.contains(b)):
            raise ValueError(f"{format_sq(a)} or {format_sq(b)} not in {self.key}")
        if self.n is None and degree(a) + degree(b) > self.t_max:
            raise ValueError("product degree exceeds the truncation")
        out = _full_product(a, b)
        if self.n is not None:
            # a sub-Hopf algebra: products never leave the profile
            assert all(self.contains(t) for t in out)
        return out

    def sum_product(self, a: Sum, b: Sum) -> Sum:
        acc: dict = {}
        for x in a:
            for y in b:
                for t in self.product(x, y):
                    xor_into(acc, t)
        return tuple(sorted(acc))

    def conjugate(self, r: Exps) -> Sum:
        """Antipode of Sq(r), computed as the transpose of conjugation on A_*."""
        key = ("chi", r)
        got = self._cache.get(key)
        if got is not None:
            return got
        d = degree(r)
        out = tuple(t for t in self.basis(d) if r in xi_antipode(t))
        with self._lock:
            self._cache[key] = out
        return out

    def coproduct(self, r: Exps) -> list:
        """Pairs (r', r'') with r' + r'' = r: the dual of multiplication in A_*."""
        out = []

        def rec(i: int, left: list, right: list) -> None:
            if i == len(r):
                out.append((trim(left), trim(right)))
                return
            for v in range(r[i] + 1):
                rec(i + 1, left + [v], right + [r[i] - v])

        rec(0, [], [])
        return out

    # -- matrices used by the resolution engine --------------------------------
    def left_sq_matrix(self, k: int, d: int) -> np.ndarray:
        """Matrix of left multiplication by Sq(2^k) from degree d to d + 2^k."""
        key = ("L", k, d)
        got = self._cache.get(key)
        if got is not None:
            return got
        g = (1 << k,)
        src = self.basis(d)
        tgt_d = d + (1 << k)
        tgt = self.basis(tgt_d) if (self.n is not None or tgt_d <= self.t_max) else ()
        mat = np.zeros((len(src), len(tgt)), dtype=np.uint8)
        if tgt:
            idx = self._index[tgt_d]
            for i, b in enumerate(src):
                for t in self.product(g, b):
                    mat[i, idx[t]] ^= 1
        mat.setflags(write=False)
        with self._lock:
            self._cache[key] = mat
        return mat

    def left_sq_gb(self, k: int, d: int) -> np.ndarray:
        """Left multiplication by Sq(2^k) from degree d to d + 2^k in generator-basis coordinates."""
        key = ("LB", k, d)
        got = self._cache.get(key)
        if got is not None:
            return got
        to_m = self.generator_basis(d)[1]
        from_m = self.generator_basis(d + (1 << k))[2]
        got = mat_mul(mat_mul(to_m, self.left_sq_matrix(k, d)), from_m)
        got.setflags(write=False)
        with self._lock:
            self._cache[key] = got
        return got

    def generator_basis(self, d: int):
        """A basis of degree d built from products Sq(2^k) * (basis of degree d - 2^k).

        Returns ``(recipe, to_milnor, from_milnor)``: ``recipe[i] = (k, j)``
        means the i-th element is Sq(2^k) times the j-th element of degree
        ``d - 2^k``; ``to_milnor`` has the Milnor coordinates of each element as
        rows, ``from_milnor`` is its inverse.  Degree 0 is the unit.
        """
        key = ("B", d)
        got = self._cache.get(key)
        if got is not None:
            return got
        from .f2linalg import Echelon, pack_bits

        dim = self.dim(d)
        if d == 0:
            eye = np.eye(dim, dtype=np.uint8)
            got = ([], eye, eye)
        else:
            recipe, rows = [], []
            ech = Echelon(dim)
            for gdeg in self.generator_degrees():
                if gdeg > d:
                    break
                k = gdeg.bit_length() - 1
                prev = self.generator_basis(d - gdeg)[1]
                lm = self.left_sq_matrix(k, d - gdeg)
                cand = mat_mul(prev, lm) if prev.shape[0] else np.zeros((0, dim), dtype=np.uint8)
                packed = pack_bits(cand) if cand.shape[0] else None
                for j in range(cand.shape[0]):
                    if len(recipe) == dim:
                        break
                    if ech.add(packed[j]):
                        recipe.append((k, j))
                        rows.append(cand[j])
                if len(recipe) == dim:
                    break
            if len(recipe) != dim:
                raise ArithmeticError(f"Sq(2^k) products fail to span degree {d} of {self.key}")
            to_m = np.array(rows, dtype=np.uint8).reshape(dim, dim)
            from_m = _invert(to_m)
            got = (recipe, to_m, from_m)
        with self._lock:
            self._cache[key] = got
        return got


def _invert(m: np.ndarray) -> np.ndarray:
    from .f2linalg import eliminate, pack_bits, unpack_bits

    n = m.shape[0]
    aug = np.concatenate([m & 1, np.eye(n, dtype=np.uint8)], axis=1)
    w = pack_bits(aug)
    piv = eliminate(w, n, full=True)
    if len(piv) != n or piv != list(range(n)):
        raise ArithmeticError("matrix not invertible over GF(2)")
    return unpack_bits(w, 2 * n)[:, n:]


_SLICES: dict = {}
_SLICES_LOCK = threading.Lock()


def get_slice(name: str, t_max: Optional[int] = None) -> AlgebraSlice:
    """Shared slice instance: ``"A0"``, ``"A1"``, ``"A2"`` (``A(n)`` spelling accepted) or ``"A"``."""
    name = name.replace("(", "").replace(")", "").strip()
    if name == "A":
        if t_max is None:
            raise ValueError("the full algebra needs an explicit degree cap t_max")
        key = ("A", t_max)
    elif re.fullmatch(r"A\d+", name):
        key = (name, None)
    else:
        raise ValueError(f"unknown algebra {name!r}")
    with _SLICES_LOCK:
        sl = _SLICES.get(key)
        if sl is None:
            sl = AlgebraSlice(t_max=t_max) if name == "A" else AlgebraSlice(n=int(name[1:]))
            _SLICES[key] = sl
    return sl


def milnor_basis(slice_: AlgebraSlice, d: int) -> tuple:
    return slice_.basis(d)


def milnor_product(a: Exps, b: Exps, slice_: AlgebraSlice) -> Sum:
    return slice_.product(a, b)


# ---------------------------------------------------------------------------
# comodule algebras

def in_a_mod_a(e: Exps, i: int) -> bool:
    """Membership of a monomial in (A//A(i))_*; i = -1 means all of A_*."""
    for j, x in enumerate(e, start=1):
        if j <= i + 1 and x % (1 << (i + 2 - j)):
            return False
    return True


def in_quotient(e: Exps, n: int) -> bool:
    """Whether a monomial survives in the quotient Hopf algebra A(n)_*."""
    for j, x in enumerate(e, start=1):
        if j > n + 1 or x >= (1 << (n + 2 - j)):
            return False
    return True


def coproduct_monomial(m: Exps, target: str = "A") -> Sum:
    """psi(m) as (left in A_*, right in the target) pairs.

    ``target`` is ``"A"`` for A_* itself or ``"A//A(i)"`` for the comodule
    algebra (A//A(i))_*; the monomial must lie in the target.
    """
    target = target.replace(" ", "")
    if target in ("A", "A_*"):
        return xi_coproduct(m)
    mt = re.fullmatch(r"A//A\(?(\d+)\)?", target)
    if not mt:
        raise ValueError(f"unknown comodule algebra {target!r}")
    i = int(mt.group(1))
    if not in_a_mod_a(m, i):
        raise ValueError(f"{format_xi(m)} is not in (A//A({i}))_*")
    out = xi_coproduct(m)
    assert all(in_a_mod_a(r, i) for _, r in out)
    return out


def reduce_left(terms: Sum, n: Optional[int]) -> Sum:
    """Drop terms whose left factor dies in A(n)_* (no-op for n None)."""
    if n is None:
        return terms
    return tuple(t for t in terms if in_quotient(t[0], n))
