"""Command-line entry point: ``steenrod-ext <subcommand> [options]``.

Exit status is 0 on success, 1 when a computation or check fails and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .modules import BUILTINS, Cone, GradedModule, ModuleError, Plain, builtin, loads_module, tensor
from .resolution import (
    ResolutionError,
    cobar_ext_oracle,
    ext_between,
    ext_of,
    h0cubed_h3_h5,
    minimal_resolution,
    prop43_facts,
)
from .steenrod import get_slice

log = logging.getLogger("steenrod_ext")

SUBCOMMANDS = ("ext", "ext-between", "cone", "product", "oracle", "bg", "tmf-e1", "vanish", "chart", "facts43")
CONFIG_KEYS = {"algebra", "smax", "tmax", "threads", "stem_max", "cap"}
# builtins reach down to degree -13 (DH14), so the truncated algebra gets this much headroom
_HEADROOM = 16


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse already names the offending flag
        raise UsageError(message)


def _read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"--config {path}: line {n} is not key=value")
            key, val = (x.strip() for x in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS:
                raise UsageError(f"--config {path}: unknown key {key!r}")
            out[key] = val
    return out


def _slice_for(name: str, t_max: int, bottom: int = 0):
    name = name.replace("(", "").replace(")", "")
    if name == "A":
        return get_slice("A", max(t_max - bottom, 1))
    if name in ("A0", "A1", "A2"):
        return get_slice(name)
    raise UsageError(f"--algebra: expected A0, A1, A2 or A, got {name!r}")


def _objects(spec: str, sl, module_file: Optional[str] = None):
    """Parse a module expression ``F1*F2*...`` with optional powers ``M21^3``.

    Returns ``(W, X)``: the tensor product of plain factors and at most one
    derived factor (H14 or DH14), which may be None.
    """
    if module_file:
        with open(module_file, encoding="utf-8") as fh:
            return loads_module(fh.read(), sl, name=module_file), None
    plain: list[GradedModule] = []
    derived = None
    for part in spec.split("*"):
        part = part.strip()
        name, _, power = part.partition("^")
        k = int(power) if power else 1
        if name not in BUILTINS:
            raise UsageError(f"--module: unknown name {name!r}; expected one of {', '.join(BUILTINS)}")
        try:
            obj = builtin(name, sl)
        except ValueError as exc:
            raise UsageError(f"--module: {exc}") from exc
        if isinstance(obj, GradedModule):
            plain.extend([obj] * k)
        else:
            if derived is not None or k != 1:
                raise UsageError("--module: at most one derived factor (H14 or DH14) is supported")
            derived = obj
    w = None
    for m in plain:
        w = m if w is None else tensor(w, m)
    if w is not None and plain:
        w.name = "*".join(m.name for m in plain)
    return w, derived


def _window(args, cfg: dict) -> tuple[int, int]:
    s = args.smax if args.smax is not None else cfg.get("smax")
    t = args.tmax if args.tmax is not None else cfg.get("tmax")
    if s is None or t is None:
        raise UsageError("--smax and --tmax are required (or set them in --config)")
    return int(s), int(t)


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="steenrod-ext", description="Ext over the Steenrod algebra and its subalgebras.")
    p.add_argument("--config", help="key=value file with default windows")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    def common(q, window=True, algebra=True):
        q.add_argument("--out", help="output file (default: stdout)")
        q.add_argument("--threads", type=int, default=None)
        if algebra:
            q.add_argument("--algebra", default=None, help="A0, A1, A2 or A")
        if window:
            q.add_argument("--smax", type=int, default=None)
            q.add_argument("--tmax", type=int, default=None)

    q = sub.add_parser("ext", help="Ext(M, F2) table from a minimal resolution")
    common(q)
    q.add_argument("--module", default="F2", help="builtin expression, e.g. M21^2*H14")
    q.add_argument("--module-file", help="module in the text format")
    q.add_argument("--rebase", action="store_true", help="move the bottom of the plain factors to degree 0")
    q.add_argument("--format", choices=("tsv", "resolution"), default="tsv")

    q = sub.add_parser("ext-between", help="Ext(M, N)")
    common(q)
    q.add_argument("--source", required=True)
    q.add_argument("--target", required=True)

    q = sub.add_parser("cone", help="Ext of the cofiber of a named class")
    common(q)
    q.add_argument("--class", dest="klass", required=True, help="h0, h1, h2, h3, v1^4 or zero")
    q.add_argument("--on", default="H1", help="module the class acts on")
    q.add_argument("--minimal", action="store_true", help="print the re-minimized cone complex instead")

    q = sub.add_parser("product", help="products of h_i on Ext of a module")
    common(q)
    q.add_argument("--module", default="F2")
    q.add_argument("--classes", required=True, help="comma list such as h0,h0,h0,h3,h5")

    q = sub.add_parser("oracle", help="Ext from the cobar complex")
    common(q)
    q.add_argument("--module", default="F2", help="F2, H1, Ceta, N11 or M21")
    q.add_argument("--cap", type=int, default=None)
    q.add_argument("--compare", action="store_true", help="also compare with the minimal resolution")

    q = sub.add_parser("bg", help="Brown-Gitler comodules and their checks")
    common(q, window=False, algebra=False)
    q.add_argument("--kind", choices=("N", "M"), default="N")
    q.add_argument("--i", type=int, default=1)
    q.add_argument("--j", type=int, default=1)
    q.add_argument("--verify", action="store_true", help="run the splitting, phi_2 isomorphism and exact-sequence checks")

    q = sub.add_parser("tmf-e1", help="E1-page of the algebraic tmf-resolution over A(2)")
    common(q, algebra=False)
    q.add_argument("--x", default="H14", help="F2, H1, H14 ...")
    q.add_argument("--nmax", type=int, default=1)
    q.add_argument("--stem-max", type=int, default=None)
    q.add_argument("--audit", action="store_true", help="cross-check vanishing regions")

    q = sub.add_parser("vanish", help="audit a TSV table against a vanishing region")
    common(q, window=False, algebra=False)
    q.add_argument("--lemma", required=True, help="region key: 7.3 (N_1(j), with --j), 7.4 (entry >= 2), 7.5 (all ones) or a1")
    q.add_argument("--j", type=int, default=0)
    q.add_argument("--table", required=True)
    q.add_argument("--stem-max", type=int, default=None)

    q = sub.add_parser("chart", help="render an Ext chart")
    common(q)
    q.add_argument("--table", help="TSV table (otherwise computed from --module)")
    q.add_argument("--module", default="F2")
    q.add_argument("--format", choices=("svg", "tsv", "ascii"), default="svg")
    q.add_argument("--annotations", help="lines/differentials/markers file")
    q.add_argument("--title", default="")

    q = sub.add_parser("facts43", help="check the full-algebra Ext facts")
    common(q, window=False, algebra=False)
    q.add_argument("--quick", action="store_true", help="skip the (10, 58) resolution")
    return p


# ---------------------------------------------------------------------------
# subcommands


def _ext_table(args, cfg, expr: str, module_file: Optional[str] = None):
    s_max, t_max = _window(args, cfg)
    alg = args.algebra or cfg.get("algebra", "A2")
    threads = _threads(args, cfg)
    sl = _slice_for(alg, t_max, bottom=-_HEADROOM)
    w, x = _objects(expr, sl, module_file)
    if x is None:
        res = minimal_resolution(w, s_max, t_max, threads=threads)
        return res.ext_table(title=w.name), res, w
    return ext_of(x, s_max, t_max, threads=threads, w=w, title=expr), None, w


def _threads(args, cfg) -> int:
    t = getattr(args, "threads", None)
    return int(t if t is not None else cfg.get("threads", 1))


def cmd_ext(args, cfg) -> int:
    tab, res, w = _ext_table(args, cfg, args.module, args.module_file)
    if args.format == "resolution":
        if res is None:
            raise UsageError("--format resolution needs a plain module")
        _write(args, res.to_text())
        return 0
    if args.rebase and w is not None:
        tab = tab.reindexed(-w.bottom, 0)
    _write(args, tab.to_tsv())
    return 0


def cmd_ext_between(args, cfg) -> int:
    s_max, t_max = _window(args, cfg)
    sl = _slice_for(args.algebra or cfg.get("algebra", "A2"), t_max, bottom=-_HEADROOM)
    w1, x1 = _objects(args.source, sl)
    w2, x2 = _objects(args.target, sl)
    if x2 is not None or w2 is None:
        raise UsageError("--target must be a plain module")
    src = x1 if x1 is not None and w1 is None else w1
    if x1 is not None and w1 is not None:
        raise UsageError("--source: tensor products with derived factors are not supported here")
    tab = ext_between(src, w2, s_max, t_max, threads=_threads(args, cfg))
    _write(args, tab.to_tsv())
    return 0


def cmd_cone(args, cfg) -> int:
    s_max, t_max = _window(args, cfg)
    sl = _slice_for(args.algebra or cfg.get("algebra", "A2"), t_max)
    on, x = _objects(args.on, sl)
    if x is not None or on is None:
        raise UsageError("--on must be a plain module")
    bideg = {"h0": (1, 1), "h1": (1, 2), "h2": (1, 4), "h3": (1, 8), "v1^4": (4, 12)}
    if args.klass == "zero":
        a, b = 1, 1
    elif args.klass in bideg:
        a, b = bideg[args.klass]
    else:
        raise UsageError(f"--class: unknown class {args.klass!r}")
    obj = Cone(args.klass, a, b, Plain(on, b, -a), Plain(on))
    if args.minimal:
        from .resolution import realize

        cx, _, _ = realize(obj, s_max, t_max, threads=_threads(args, cfg))
        _write(args, cx.minimize().to_text())
        return 0
    tab = ext_of(obj, s_max, t_max, threads=_threads(args, cfg), title=f"cone({args.klass} on {args.on})")
    _write(args, tab.to_tsv())
    return 0


def cmd_product(args, cfg) -> int:
    import numpy as np

    s_max, t_max = _window(args, cfg)
    sl = _slice_for(args.algebra or cfg.get("algebra", "A2"), t_max)
    w, x = _objects(args.module, sl)
    if x is not None:
        raise UsageError("--module must be a plain module")
    names = [c.strip() for c in args.classes.split(",") if c.strip()]
    idx = []
    for c in names:
        if len(c) < 2 or c[0] != "h" or not c[1:].isdigit():
            raise UsageError(f"--classes: expected names h<i>, got {c!r}")
        idx.append(int(c[1:]))
    res = minimal_resolution(w, s_max, t_max, threads=_threads(args, cfg))
    if w.dim_in(w.bottom) != 1:
        raise UsageError("--module must have a one-dimensional bottom degree")
    v = np.ones(1, dtype=np.uint8)
    s, t = 0, w.bottom
    lines = []
    for i in sorted(idx, reverse=True):
        if s + 1 > res.s_max or t + (1 << i) > res.t_max:
            raise ResolutionError(f"window too small for the product at ({s + 1}, {t + (1 << i)})")
        v = res.hi_times(i, s, t, v)
        s, t = s + 1, t + (1 << i)
    lines.append(f"product\t{'*'.join(names)}\t{s}\t{t}\t{'nonzero' if v.any() else 'zero'}")
    if s + 1 <= res.s_max and t + 1 <= res.t_max:
        h0 = res.hi_times(0, s, t, v)
        lines.append(f"h0*product\t{s + 1}\t{t + 1}\t{'nonzero' if h0.any() else 'zero'}")
    _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_oracle(args, cfg) -> int:
    from .brown_gitler import m_comodule, n_comodule
    from .modules import ceta_comodule, h1_comodule, module_from_comodule, trivial_comodule

    s_max, t_max = _window(args, cfg)
    alg = (args.algebra or cfg.get("algebra", "A2")).replace("(", "").replace(")", "")
    over = None if alg == "A" else int(alg[1:])
    comods = {"F2": trivial_comodule, "H1": h1_comodule, "Ceta": ceta_comodule,
              "N11": lambda: n_comodule(1, 1).comodule, "M21": lambda: m_comodule(2, 1).comodule}
    if args.module not in comods:
        raise UsageError(f"--module: the oracle takes one of {', '.join(comods)}")
    c = comods[args.module]()
    cap = args.cap if args.cap is not None else int(cfg.get("cap", 60000))
    tab = cobar_ext_oracle(c, s_max, t_max, over=over, cap=cap)
    text = tab.to_tsv()
    if args.compare:
        sl = _slice_for(alg, t_max)
        res = minimal_resolution(module_from_comodule(c, sl, name=args.module), s_max, t_max,
                                 threads=_threads(args, cfg))
        same = res.ext_table().same_dims(tab)
        text += f"# resolution agrees: {'yes' if same else 'no'}\n"
        _write(args, text)
        return 0 if same else 1
    _write(args, text)
    return 0


def cmd_bg(args, cfg) -> int:
    from . import brown_gitler as bg

    if args.verify:
        lines, ok = [], True
        for i in (1, 2):
            rep = bg.verify_splitting(i, 32)
            lines.append(f"splitting i={i} d<=32\t{'pass' if rep.ok else 'FAIL'}")
            ok &= rep.ok
        for j in (1, 2, 3):
            _, iso = bg.phi_isomorphism(2, j)
            lines.append(f"M_2({j}) = Sigma^{8 * j} N_1({j})\t{'pass' if iso.ok else 'FAIL'}")
            ok &= iso.ok
        for j in (1, 2):
            for cert in (bg.odd_sequence(j), bg.even_sequence(j)):
                lines.append(f"{cert.summary()}")
                ok &= cert.ok
        _write(args, "\n".join(lines) + "\n")
        return 0 if ok else 1
    obj = bg.n_comodule(args.i, args.j) if args.kind == "N" else bg.m_comodule(args.i, args.j)
    _write(args, bg.dump_tsv(obj))
    return 0


def cmd_tmf_e1(args, cfg) -> int:
    from .tmf_resolution import e1_page, vanishing_crosscheck

    s_max, t_max = _window(args, cfg)
    sl = get_slice("A2")
    w, x = _objects(args.x, sl)
    obj = x if x is not None else w
    if x is not None and w is not None:
        raise UsageError("--x: give a single object")
    stem_max = args.stem_max if args.stem_max is not None else cfg.get("stem_max")
    stem_max = None if stem_max is None else int(stem_max)
    page = e1_page(obj, args.nmax, s_max, t_max, threads=_threads(args, cfg), stem_max=stem_max, x_name=args.x)
    text = page.to_tsv()
    ok = True
    if args.audit:
        for rep in vanishing_crosscheck(page, stem_max=stem_max):
            text += "# " + rep.summary() + "\n"
            ok &= rep.passed
    _write(args, text)
    return 0 if ok else 1


def cmd_vanish(args, cfg) -> int:
    from .resolution import ExtTable
    from .vanishing import audit, named_region

    try:
        region = named_region(args.lemma, args.j)
    except ValueError as exc:
        raise UsageError(f"--lemma: {exc}") from exc
    with open(args.table, encoding="utf-8") as fh:
        tab = ExtTable.from_tsv(fh.read())
    rep = audit(tab, region, name=region.name, stem_max=args.stem_max)
    _write(args, rep.summary() + "\n")
    return 0 if rep.passed else 1


def cmd_chart(args, cfg) -> int:
    from .chart import chart_from_ext, emit, load_annotations
    from .resolution import ExtTable

    if args.table:
        with open(args.table, encoding="utf-8") as fh:
            tab = ExtTable.from_tsv(fh.read())
    else:
        tab, _, _ = _ext_table(args, cfg, args.module)
    spec = chart_from_ext(tab, title=args.title or tab.title)
    if args.annotations:
        with open(args.annotations, encoding="utf-8") as fh:
            spec = load_annotations(fh.read(), spec)
    _write(args, emit(spec, args.format))
    return 0


def cmd_facts43(args, cfg) -> int:
    threads = _threads(args, cfg)
    lines, ok = [], True
    sl = get_slice("A", 20)
    h1 = builtin("H1", sl)
    tab = ext_between(h1, h1, 4, 20, threads=threads)
    d = tab.dim(4, 12)
    lines.append(f"dim Ext^{{4,12}}(H1,H1) = 1\t{'pass' if d == 1 else 'FAIL'}\tdim = {d}")
    ok &= d == 1
    rep = h0cubed_h3_h5(threads=threads)
    good = rep["nonzero"] and rep["killed_by_h0"]
    lines.append(f"h0^3 h3 h5 != 0 in Ext^{{5,43}}, h0-annihilated\t{'pass' if good else 'FAIL'}")
    ok &= good
    if not args.quick:
        for f in prop43_facts(threads=threads):
            lines.append(f"{f.name}\t{'pass' if f.passed else 'FAIL'}\t{f.detail}")
            ok &= f.passed
    _write(args, "\n".join(lines) + "\n")
    return 0 if ok else 1


COMMANDS = {
    "ext": cmd_ext, "ext-between": cmd_ext_between, "cone": cmd_cone, "product": cmd_product,
    "oracle": cmd_oracle, "bg": cmd_bg, "tmf-e1": cmd_tmf_e1, "vanish": cmd_vanish,
    "chart": cmd_chart, "facts43": cmd_facts43,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.cmd:
            raise UsageError("a subcommand is required: " + ", ".join(SUBCOMMANDS))
        cfg = _read_config(args.config) if args.config else {}
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return COMMANDS[args.cmd](args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except (ResolutionError, ModuleError, ArithmeticError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def cli(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
