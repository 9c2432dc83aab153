"""Brown-Gitler comodules carved out of (A//A(i))_* by the weight filtration.

Weights: xi_j has weight 2^(j-1), so a monomial ``e`` has weight
``sum e_j 2^(j-1)``.  N_i(j) is spanned by monomials of (A//A(i))_* of weight
at most 2^(i+1) j; M_i(j) by those of weight exactly 2^(i+1) j.  Everything in
this module is spanned by monomials, so sub- and quotient comodules are
described by monomial sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .f2linalg import BitMatrix, kernel_basis, rank, same_row_space
from .modules import ComodulePresentation, ModuleError, comodule_tensor
from .steenrod import (
    Exps,
    add_exps,
    degree,
    format_xi,
    in_a_mod_a,
    in_quotient,
    trim,
    weight,
    xi_coproduct,
    xor_into,
)

# ---------------------------------------------------------------------------
# monomials


def xi_label(e: Exps) -> str:
    """Whitespace-free label for a monomial (used as a module basis label)."""
    return format_xi(e).replace(" ", ".")


def admissible_monomials(i: int, d_max: int, w_max: Optional[int] = None) -> list[Exps]:
    """Monomials of (A//A(i))_* with degree <= d_max (and weight <= w_max).

    Sorted by degree, then lexicographically on the exponent sequence.
    """
    out: list[Exps] = []
    k_max = max(1, (d_max + 1).bit_length())

    def step(k: int) -> int:
        return 1 << (i + 2 - k) if k <= i + 1 else 1

    def rec(k: int, deg_left: int, w_left: Optional[int], acc: list) -> None:
        if k > k_max:
            out.append(trim(acc))
            return
        dk = (1 << k) - 1
        wk = 1 << (k - 1)
        e = 0
        st = step(k)
        while e * dk <= deg_left and (w_left is None or e * wk <= w_left):
            acc.append(e)
            rec(k + 1, deg_left - e * dk, None if w_left is None else w_left - e * wk, acc)
            acc.pop()
            e += st

    rec(1, d_max, w_max, [])
    out.sort(key=lambda e: (degree(e), e))
    return out


def phi_monomial(e: Exps) -> Exps:
    """phi_i on a monomial: xi_1 powers go to 1, xi_k^(2^l) to xi_(k-1)^(2^l)."""
    return trim(e[1:])


def tau_split(e: Exps) -> tuple[Exps, Exps]:
    """tau on a monomial of (A//A(1))_*: the (A//A(2))_* part and the Lambda part."""
    if not in_a_mod_a(e, 1):
        raise ValueError(f"{format_xi(e)} is not in (A//A(1))_*")
    ex = list(e) + [0, 0, 0]
    a = [ex[0] - ex[0] % 8, ex[1] - ex[1] % 4, ex[2] - ex[2] % 2] + ex[3:]
    b = [ex[0] % 8, ex[1] % 4, ex[2] % 2]
    return trim(a), trim(b)


def tau_filtration(e: Exps) -> int:
    """The index k with tau(e) in M_2(k) (x) (A(2)//A(1))_*."""
    return weight(tau_split(e)[0]) // 8


# ---------------------------------------------------------------------------
# comodules spanned by monomials


@dataclass(frozen=True)
class BGComodule:
    """A comodule with a monomial basis; ``comodule`` carries the coaction."""

    i: int
    kind: str
    j: Optional[int]
    monomials: tuple
    comodule: ComodulePresentation

    @property
    def dim(self) -> int:
        return len(self.monomials)

    @property
    def weights(self) -> tuple:
        return tuple(weight(m) for m in self.monomials)

    @property
    def degrees(self) -> tuple:
        return self.comodule.degrees

    def index(self) -> dict:
        return {m: k for k, m in enumerate(self.monomials)}

    def dims_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))


def span_comodule(monos: Sequence[Exps], over: Optional[int], what: str = "subspace",
                  drop: Optional[Callable[[Exps], bool]] = None,
                  shift: int = 0) -> ComodulePresentation:
    """Coaction on the span of ``monos``, restricted from psi on A_*.

    Left factors are reduced to A(over)_*.  Right factors for which ``drop``
    holds are discarded (a quotient); any other right factor outside the span
    is an escape and raises.
    """
    index = {m: k for k, m in enumerate(monos)}
    co = []
    for m in monos:
        acc: dict = {}
        for l, r in xi_coproduct(m):
            if over is not None and not in_quotient(l, over):
                continue
            if drop is not None and drop(r):
                continue
            k = index.get(r)
            if k is None:
                raise ModuleError(f"coaction of {format_xi(m)} escapes {what} via "
                                  f"{format_xi(l)} (x) {format_xi(r)}")
            xor_into(acc, (l, k))
        co.append(tuple(sorted(acc)))
    labels = tuple(xi_label(m) for m in monos)
    degrees = tuple(degree(m) + shift for m in monos)
    return ComodulePresentation(labels, degrees, tuple(co), over)


def a_mod_a(i: int, d_max: int) -> BGComodule:
    """(A//A(i))_* through degree d_max, as an A_*-comodule."""
    monos = admissible_monomials(i, d_max)
    return BGComodule(i, "AmodA", None, tuple(monos), span_comodule(monos, None, f"(A//A({i}))_*"))


def n_comodule(i: int, j: int) -> BGComodule:
    """N_i(j): weight at most 2^(i+1) j, an A_*-comodule."""
    if j < 0:
        raise ValueError("j must be non-negative")
    w = (1 << (i + 1)) * j
    # weight w forces degree below 2w
    monos = admissible_monomials(i, max(2 * w, 0), w)
    return BGComodule(i, "N", j, tuple(monos), span_comodule(monos, None, f"N_{i}({j})"))


def m_comodule(i: int, j: int) -> BGComodule:
    """M_i(j): weight exactly 2^(i+1) j, an A(i)_*-comodule."""
    if j < 0:
        raise ValueError("j must be non-negative")
    w = (1 << (i + 1)) * j
    monos = [m for m in admissible_monomials(i, max(2 * w, 0), w) if weight(m) == w]
    return BGComodule(i, "M", j, tuple(monos), span_comodule(monos, i, f"M_{i}({j})"))


def lambda_a2_a1() -> BGComodule:
    """(A(2)//A(1))_* = Lambda[xi1^4, xi2^2, xi3] as an A(2)_*-comodule."""
    monos = [trim([4 * a, 2 * b, c]) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    monos.sort(key=lambda e: (degree(e), e))
    # in (A//A(1))_* these span a subcomodule only after reducing into A(2)_*
    def outside(r: Exps) -> bool:
        return tau_split(r)[0] != ()
    return BGComodule(1, "Lambda", None, tuple(monos),
                      span_comodule(monos, 2, "(A(2)//A(1))_*", drop=outside))


def dump_tsv(bg: BGComodule) -> str:
    lines = ["monomial\tdegree\tweight"]
    for m in bg.monomials:
        lines.append(f"{format_xi(m)}\t{degree(m)}\t{weight(m)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# comodule maps


@dataclass(frozen=True)
class ComoduleMap:
    """Linear map between comodules; row ``k`` of ``matrix`` is the image of basis ``k``."""

    name: str
    source: ComodulePresentation
    target: ComodulePresentation
    matrix: np.ndarray
    over: Optional[int] = None

    def image_of(self, k: int) -> tuple:
        return tuple(int(x) for x in np.flatnonzero(self.matrix[k]))

    def failures(self, graded: bool = True) -> list[str]:
        """Basis elements where the map does not commute with the coactions."""
        out = []
        over = self.over
        src, tgt = self.source, self.target
        for k in range(src.dim):
            img = self.image_of(k)
            if graded:
                for x in img:
                    if tgt.degrees[x] != src.degrees[k]:
                        out.append(f"{self.name}: {src.labels[k]} changes degree")
                        break
            lhs: dict = {}
            for l, b in src.coaction[k]:
                if over is not None and not in_quotient(l, over):
                    continue
                for x in self.image_of(b):
                    xor_into(lhs, (l, x))
            rhs: dict = {}
            for x in img:
                for l, y in tgt.coaction[x]:
                    if over is not None and not in_quotient(l, over):
                        continue
                    xor_into(rhs, (l, y))
            if lhs.keys() != rhs.keys():
                out.append(f"{self.name}: coaction mismatch on {src.labels[k]} "
                           f"(degree {src.degrees[k]})")
        return out

    def is_comodule_map(self, graded: bool = True) -> bool:
        return not self.failures(graded)

    def compose(self, other: "ComoduleMap", name: str = "") -> "ComoduleMap":
        """``other`` after ``self``."""
        prod = (self.matrix.astype(np.int64) @ other.matrix.astype(np.int64)) & 1
        return ComoduleMap(name or f"{other.name}.{self.name}", self.source, other.target,
                           prod.astype(np.uint8), _narrow(self.over, other.over))


def _narrow(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def monomial_map(name: str, source: BGComodule, target: BGComodule,
                 f: Callable[[Exps], Optional[Exps]], over: Optional[int]) -> ComoduleMap:
    """The map sending each source monomial to a target monomial (or to 0 for None)."""
    tidx = target.index()
    mat = np.zeros((source.dim, target.dim), dtype=np.uint8)
    for k, m in enumerate(source.monomials):
        img = f(m)
        if img is None:
            continue
        if img not in tidx:
            raise ModuleError(f"{name}: image of {format_xi(m)} is not a target basis element")
        mat[k, tidx[img]] = 1
    return ComoduleMap(name, source.comodule, target.comodule, mat, over)


def phi(i: int, source: BGComodule, target: Optional[BGComodule] = None) -> ComoduleMap:
    """phi_i restricted to a monomial subspace of (A//A(i))_*.

    Without ``target`` the image is presented as the span of the image
    monomials inside (A//A(i-1))_*, ungraded (degrees are those of the source
    minus the weight).
    """
    if i < 1:
        raise ValueError("phi_i needs i >= 1")
    if target is None:
        imgs = sorted({phi_monomial(m) for m in source.monomials}, key=lambda e: (degree(e), e))
        target = BGComodule(i - 1, "image", source.j, tuple(imgs),
                            span_comodule(imgs, i, "image of phi"))
    return monomial_map(f"phi_{i}", source, target, phi_monomial, i)


def phi_check(i: int, d_max: int) -> list[str]:
    """Check that phi_i commutes with the A(i)_*-coaction on (A//A(i))_* through d_max (ungraded)."""
    src = a_mod_a(i, d_max)
    imgs = sorted({phi_monomial(m) for m in src.monomials}, key=lambda e: (degree(e), e))
    tgt = BGComodule(i - 1, "AmodA", None, tuple(imgs), span_comodule(imgs, None, "phi image"))
    return monomial_map(f"phi_{i}", src, tgt, phi_monomial, i).failures(graded=False)


@dataclass
class IsoReport:
    ok: bool
    shift: Optional[int]
    messages: list = field(default_factory=list)


def phi_isomorphism(i: int, j: int) -> tuple[ComoduleMap, IsoReport]:
    """phi_i : M_i(j) -> Sigma^(2^(i+1) j) N_(i-1)(j) with a full check."""
    src = m_comodule(i, j)
    tgt_bg = n_comodule(i - 1, j)
    shift = (1 << (i + 1)) * j
    tgt = BGComodule(tgt_bg.i, "N", j, tgt_bg.monomials,
                     tgt_bg.comodule.shift(shift).restrict(i))
    f = monomial_map(f"phi_{i}", src, tgt, phi_monomial, i)
    msgs = f.failures(graded=True)
    n_src, n_tgt = src.dim, tgt.dim
    if n_src != n_tgt:
        msgs.append(f"dimensions differ: {n_src} vs {n_tgt}")
    elif rank(BitMatrix.from_dense(f.matrix)) != n_src:
        msgs.append("phi is not bijective")
    return f, IsoReport(not msgs, shift, msgs)


# ---------------------------------------------------------------------------
# splitting


@dataclass
class SplittingReport:
    i: int
    d_max: int
    failing_degrees: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failing_degrees and not self.messages


def verify_splitting(i: int, d_max: int) -> SplittingReport:
    """(A//A(i))_* = sum_j M_i(j) as A(i)_*-comodules, checked through d_max."""
    rep = SplittingReport(i, d_max)
    whole = admissible_monomials(i, d_max)
    step = 1 << (i + 1)
    by_weight: dict[int, list] = {}
    for m in whole:
        w = weight(m)
        if w % step:
            rep.messages.append(f"{format_xi(m)} has weight {w} not divisible by {step}")
        by_weight.setdefault(w // step, []).append(m)
    total: dict[int, int] = {}
    pieces: dict[int, int] = {}
    for m in whole:
        total[degree(m)] = total.get(degree(m), 0) + 1
    for j in sorted(by_weight):
        mj = m_comodule(i, j)
        for m in mj.monomials:
            if degree(m) <= d_max:
                pieces[degree(m)] = pieces.get(degree(m), 0) + 1
        try:
            mj.comodule.check()
        except ModuleError as exc:
            rep.messages.append(f"M_{i}({j}): {exc}")
            rep.failing_degrees.append(min(mj.degrees))
    for d in range(d_max + 1):
        if total.get(d, 0) != pieces.get(d, 0):
            rep.failing_degrees.append(d)
    # the A(i)_*-coaction on the whole algebra must not mix weights
    idx_w = {m: weight(m) for m in whole}
    for m in whole:
        for l, r in xi_coproduct(m):
            if in_quotient(l, i) and idx_w.get(r, weight(r)) != idx_w[m]:
                rep.messages.append(f"coaction on {format_xi(m)} mixes weights")
                rep.failing_degrees.append(degree(m))
                break
    rep.failing_degrees = sorted(set(rep.failing_degrees))
    return rep


# ---------------------------------------------------------------------------
# the tau filtration of (A//A(1))_*


def f_comodule(j: int, d_max: int) -> BGComodule:
    """F^j(A//A(1))_* through degree d_max, as an A(2)_*-comodule (escapes raise)."""
    monos = [m for m in admissible_monomials(1, d_max) if tau_filtration(m) >= j]
    return BGComodule(1, "F", j, tuple(monos), span_comodule(monos, 2, f"F^{j}"))


def q_monomials(j: int) -> list[Exps]:
    w = 8 * j + 12
    monos = admissible_monomials(1, 2 * w, w)
    return [m for m in monos if tau_filtration(m) <= j]


def q_comodule(j: int) -> BGComodule:
    """Q^j = (A//A(1))_* / F^(j+1), an A(2)_*-comodule."""
    monos = q_monomials(j)
    co = span_comodule(monos, 2, f"Q^{j}", drop=lambda r: tau_filtration(r) > j)
    return BGComodule(1, "Q", j, tuple(monos), co)


def e0_q_comodule(j: int) -> BGComodule:
    """Associated graded of Q^j for the tau filtration."""
    monos = q_monomials(j)
    index = {m: k for k, m in enumerate(monos)}
    co = []
    for m in monos:
        f = tau_filtration(m)
        acc: dict = {}
        for l, r in xi_coproduct(m):
            if in_quotient(l, 2) and tau_filtration(r) == f:
                xor_into(acc, (l, index[r]))
        co.append(tuple(sorted(acc)))
    pres = ComodulePresentation(tuple(xi_label(m) for m in monos),
                                tuple(degree(m) for m in monos), tuple(co), 2)
    return BGComodule(1, "E0Q", j, tuple(monos), pres)


def n2_tensor_lambda(j: int) -> tuple[BGComodule, dict]:
    """N_2(j) (x) (A(2)//A(1))_* with its basis keyed by (a, b) monomial pairs."""
    n2 = n_comodule(2, j)
    lam = lambda_a2_a1()
    pres = comodule_tensor(n2.comodule.restrict(2), lam.comodule)
    pairs = [(a, b) for a in n2.monomials for b in lam.monomials]
    key = {p: k for k, p in enumerate(pairs)}
    return BGComodule(2, "N2xLambda", j, tuple(pairs), pres), key


@dataclass
class TauReport:
    j: int
    F: list
    Q: list
    tau: ComoduleMap
    messages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.messages


def tau_quotients(j: int, d_max: int) -> TauReport:
    """F^0..F^(j+1) through d_max, Q^0..Q^j, and tau on E^0 Q^j.

    Building each F^k checks that the coaction does not leave it; the tau
    check compares coactions on the associated graded, where the map is
    claimed to be an isomorphism of A(2)_*-comodules.
    """
    msgs: list[str] = []
    fs = []
    for k in range(j + 2):
        try:
            fs.append(f_comodule(k, d_max))
        except ModuleError as exc:
            msgs.append(f"F^{k}: {exc}")
    qs = []
    for k in range(j + 1):
        q = q_comodule(k)
        try:
            q.comodule.check()
        except ModuleError as exc:
            msgs.append(f"Q^{k}: {exc}")
        qs.append(q)
    e0 = e0_q_comodule(j)
    tgt, key = n2_tensor_lambda(j)
    mat = np.zeros((e0.dim, tgt.dim), dtype=np.uint8)
    for k, m in enumerate(e0.monomials):
        mat[k, key[tau_split(m)]] = 1
    tau = ComoduleMap("tau", e0.comodule, tgt.comodule, mat, 2)
    msgs.extend(tau.failures(graded=True))
    if e0.dim != tgt.dim or rank(BitMatrix.from_dense(mat)) != e0.dim:
        msgs.append("tau is not bijective on E^0 Q^j")
    return TauReport(j, fs, qs, tau, msgs)


# ---------------------------------------------------------------------------
# exact sequences


@dataclass
class ExactnessCertificate:
    """Maps of a sequence 0 -> C_0 -> ... -> C_k -> 0 with their checks."""

    name: str
    j: int
    terms: list
    maps: list
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def dims(self) -> list[int]:
        return [t.dim for _, t in self.terms]

    def alternating_sum(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.dims()))

    def summary(self) -> str:
        parts = " -> ".join(f"{nm}[{t.dim}]" for nm, t in self.terms)
        state = "ok" if self.ok else "FAIL"
        return f"{self.name}(j={self.j}): 0 -> {parts} -> 0 {state}"


def _degree_block(mat: np.ndarray, src_deg: Sequence[int], tgt_deg: Sequence[int], d: int):
    rows = [k for k, x in enumerate(src_deg) if x == d]
    cols = [k for k, x in enumerate(tgt_deg) if x == d]
    return mat[np.ix_(rows, cols)] if rows and cols else np.zeros((len(rows), len(cols)), np.uint8)


def check_exactness(name: str, j: int, terms: list, maps: list) -> ExactnessCertificate:
    """Comodule-map and subspace-level exactness checks, degree by degree."""
    cert = ExactnessCertificate(name, j, terms, maps)
    for f in maps:
        cert.failures.extend(f.failures(graded=True))
    pres = [t.comodule if isinstance(t, BGComodule) else t for _, t in terms]
    degs = sorted({d for p in pres for d in p.degrees})
    for k in range(len(pres)):
        incoming = maps[k - 1] if k >= 1 else None
        outgoing = maps[k] if k < len(maps) else None
        here = pres[k]
        for d in degs:
            n_here = sum(1 for x in here.degrees if x == d)
            if n_here == 0:
                continue
            if outgoing is not None:
                blk = _degree_block(outgoing.matrix, here.degrees, pres[k + 1].degrees, d)
                ker = kernel_basis(BitMatrix.from_dense(blk.T)) if blk.shape[1] else \
                    BitMatrix.identity(n_here)
            else:
                ker = BitMatrix.identity(n_here)
            if incoming is not None:
                blk_in = _degree_block(incoming.matrix, pres[k - 1].degrees, here.degrees, d)
                img = BitMatrix.from_dense(blk_in) if blk_in.shape[0] else BitMatrix.zeros(0, n_here)
            else:
                img = BitMatrix.zeros(0, n_here)
            if not same_row_space(img, ker):
                where = terms[k][0]
                cert.failures.append(
                    f"{name}(j={j}): image != kernel at {where} in degree {d} "
                    f"(rank image {rank(img)}, dim kernel {ker.n_rows})")
    return cert


def _phi2_inverse(n: Exps, j: int) -> Exps:
    """The monomial of M_2(j) mapping to ``n`` in N_1(j) under phi_2."""
    e1 = 8 * j - 2 * weight(n)
    if e1 < 0:
        raise ValueError("weight too large for M_2(j)")
    return trim([e1] + list(n))


def odd_sequence(j: int) -> ExactnessCertificate:
    """0 -> Sigma^(8j) N_1(j) (x) N_1(1) -> N_1(2j+1) -> Q^(j-1) -> 0."""
    if j < 1:
        raise ValueError("j must be at least 1")
    nj = n_comodule(1, j)
    n1 = n_comodule(1, 1)
    left_pres = comodule_tensor(nj.comodule.shift(8 * j).restrict(2), n1.comodule.restrict(2))
    left_pairs = [(a, b) for a in nj.monomials for b in n1.monomials]
    mid = n_comodule(1, 2 * j + 1)
    mid_pres = mid.comodule.restrict(2)
    right = q_comodule(j - 1)
    mid_idx = mid.index()
    inc = np.zeros((len(left_pairs), mid.dim), dtype=np.uint8)
    for k, (a, b) in enumerate(left_pairs):
        inc[k, mid_idx[add_exps(_phi2_inverse(a, j), b)]] = 1
    right_idx = right.index()
    rho = np.zeros((mid.dim, right.dim), dtype=np.uint8)
    for k, m in enumerate(mid.monomials):
        if tau_filtration(m) <= j - 1:
            rho[k, right_idx[m]] = 1
    terms = [("S^8j N_1(j)(x)N_1(1)", left_pres), (f"N_1({2 * j + 1})", mid_pres),
             (f"Q^{j - 1}", right.comodule)]
    maps = [ComoduleMap("inclusion", left_pres, mid_pres, inc, 2),
            ComoduleMap("rho", mid_pres, right.comodule, rho, 2)]
    return _certify("odd_sequence", j, terms, maps)


def even_sequence(j: int) -> ExactnessCertificate:
    """0 -> Sigma^(8j) N_1(j) -> N_1(2j) -> Q^(j-1) -> Sigma^(8j+9) N_1(j-1) -> 0."""
    if j < 1:
        raise ValueError("j must be at least 1")
    nj = n_comodule(1, j)
    a_src = nj.comodule.shift(8 * j).restrict(2)
    mid = n_comodule(1, 2 * j)
    mid_pres = mid.comodule.restrict(2)
    q = q_comodule(j - 1)
    nl = n_comodule(1, j - 1)
    top = (4, 2, 1)
    g_tgt = nl.comodule.shift(8 * j + 9).restrict(2)
    mid_idx = mid.index()
    alpha = np.zeros((nj.dim, mid.dim), dtype=np.uint8)
    for k, n in enumerate(nj.monomials):
        alpha[k, mid_idx[_phi2_inverse(n, j)]] = 1
    alpha_map = ComoduleMap("alpha", a_src, mid_pres, alpha, 2)
    beta_map, beta_notes = _beta(j, mid, mid_pres, q, alpha)
    q_idx_nl = nl.index()
    gamma = np.zeros((q.dim, nl.dim), dtype=np.uint8)
    for k, m in enumerate(q.monomials):
        a, b = tau_split(m)
        if b == top and tau_filtration(m) == j - 1:
            gamma[k, q_idx_nl[phi_monomial(a)]] = 1
    gamma_map = ComoduleMap("gamma", q.comodule, g_tgt, gamma, 2)
    terms = [("S^8j N_1(j)", a_src), (f"N_1({2 * j})", mid_pres), (f"Q^{j - 1}", q.comodule),
             ("S^(8j+9) N_1(j-1)", g_tgt)]
    cert = _certify("even_sequence", j, terms, [alpha_map, beta_map, gamma_map])
    cert.failures.extend(beta_notes)
    return cert


def _beta(j: int, mid: BGComodule, mid_pres: ComodulePresentation, q: BGComodule,
          alpha: np.ndarray) -> tuple[ComoduleMap, list[str]]:
    """beta = beta_2 . beta_1 with beta_1 : N_1(2j) -> K = coker(alpha) and
    beta_2 : K -> Q^(j-1) induced by delta : N_1(2j) -> Q^j."""
    notes: list[str] = []
    # K: the quotient of N_1(2j) by the monomials in the image of alpha
    hit = {int(np.flatnonzero(alpha[k])[0]) for k in range(alpha.shape[0])}
    k_monos = [m for x, m in enumerate(mid.monomials) if x not in hit]
    hit_monos = {mid.monomials[x] for x in hit}
    k_pres = span_comodule(k_monos, 2, "coker alpha",
                           drop=lambda r: r in hit_monos)
    k_idx = {m: x for x, m in enumerate(k_monos)}
    beta1 = np.zeros((mid.dim, len(k_monos)), dtype=np.uint8)
    for x, m in enumerate(mid.monomials):
        if m in k_idx:
            beta1[x, k_idx[m]] = 1
    beta1_map = ComoduleMap("beta_1", mid_pres, k_pres, beta1, 2)
    qj = q_comodule(j)
    qj_idx = qj.index()
    delta = np.zeros((mid.dim, qj.dim), dtype=np.uint8)
    for x, m in enumerate(mid.monomials):
        delta[x, qj_idx[m]] = 1
    delta_map = ComoduleMap("delta", mid_pres, qj.comodule, delta, 2)
    notes.extend(delta_map.failures())
    if rank(BitMatrix.from_dense(delta)) != mid.dim:
        notes.append("delta is not injective")
    proj = np.zeros((qj.dim, q.dim), dtype=np.uint8)
    q_idx = q.index()
    for x, m in enumerate(qj.monomials):
        if m in q_idx:
            proj[x, q_idx[m]] = 1
    proj_map = ComoduleMap("Q^j->Q^(j-1)", qj.comodule, q.comodule, proj, 2)
    notes.extend(proj_map.failures())
    # beta_2 is determined by beta_2 . beta_1 = proj . delta, since beta_1 is onto
    through = (delta.astype(np.int64) @ proj.astype(np.int64)) & 1
    beta2 = np.zeros((len(k_monos), q.dim), dtype=np.uint8)
    for x, m in enumerate(mid.monomials):
        if m in k_idx:
            beta2[k_idx[m]] = through[x]
        elif through[x].any():
            notes.append(f"proj.delta does not vanish on im(alpha) at {format_xi(m)}")
    beta2_map = ComoduleMap("beta_2", k_pres, q.comodule, beta2, 2)
    notes.extend(beta1_map.failures())
    notes.extend(beta2_map.failures())
    beta = beta1_map.compose(beta2_map, name="beta")
    if not np.array_equal(beta.matrix, through.astype(np.uint8)):
        notes.append("beta_2 . beta_1 differs from the projection")
    return beta, notes


def _certify(name: str, j: int, terms: list, maps: list) -> ExactnessCertificate:
    return check_exactness(name, j, terms, maps)
