from __future__ import annotations

import pytest

from steenrod_ext.modules import builtin
from steenrod_ext.resolution import ResolutionError, minimal_resolution
from steenrod_ext.steenrod import get_slice
from steenrod_ext.tmf_resolution import (
    E1Page,
    change_of_rings_check,
    e1_page,
    format_tuple,
    n11_comodule,
    parse_tuple,
    region_for_tuple,
    truncate_comodule,
    tuple_module,
    tuples_up_to,
    vanishing_crosscheck,
)
from steenrod_ext.vanishing import REGION_LARGE_ENTRY, REGION_ALL_ONES, bg_region


@pytest.fixture(scope="module")
def page_f2():
    return e1_page(builtin("F2", get_slice("A2")), 2, 6, 24, x_name="F2")


def test_tuple_enumeration():
    tps = tuples_up_to(3, 48)
    # compositions of 0..6 into at most 3 parts
    from itertools import product

    brute = {()}
    for n in range(1, 4):
        for tp in product(range(1, 7), repeat=n):
            if sum(tp) <= 6:
                brute.add(tp)
    assert set(tps) == brute
    assert len(tps) == len(brute) == 42
    assert tps[0] == ()


def test_tuple_text():
    for tp in [(), (1,), (2, 1, 3)]:
        assert parse_tuple(format_tuple(tp)) == tp
    assert format_tuple(()) == "-"


def test_tuple_module_degrees():
    m = tuple_module((1,))
    assert m.degrees == (8, 12, 14, 15)
    assert tuple_module((1, 1)).dim == 16


def test_row_zero_is_ext_of_x(page_f2):
    direct = minimal_resolution(builtin("F2", get_slice("A2")), 7, 24).ext_table()
    assert page_f2.table(()).restricted(6, 24).same_dims(direct.restricted(6, 24))


def test_homological_shift(page_f2):
    direct = minimal_resolution(tuple_module((1,)), 7, 24).ext_table()
    for (s, t), v in direct.dims.items():
        if s + 1 <= 6:
            assert page_f2.dim(1, (1,), s + 1, t) == v
    assert not [k for k in page_f2.entries if k[1] == (1,) and k[2] == 0]


def test_page_needs_a2():
    with pytest.raises(ResolutionError):
        e1_page(builtin("F2", get_slice("A1")), 1, 3, 16)


def test_page_tsv_roundtrip(page_f2):
    back = E1Page.from_tsv(page_f2.to_tsv())
    assert back.entries == {k: v for k, v in page_f2.entries.items() if v}
    assert page_f2.to_tsv().splitlines()[1] == "n\tj-tuple\ts\tt\tdim"


def test_regions_for_tuples():
    assert region_for_tuple(())[0] == bg_region(0)
    assert region_for_tuple((2,))[0] is REGION_LARGE_ENTRY
    assert region_for_tuple((1, 2))[0] is REGION_LARGE_ENTRY
    assert region_for_tuple((1, 1, 1))[0] is REGION_ALL_ONES
    # the j = 1 region (17, 15, 2) moved through Sigma^8 [-1] once and twice
    one = region_for_tuple((1,))[0]
    two = region_for_tuple((1, 1))[0]
    assert (one.c7, one.c6, one.c5) == (17, 14, 0)
    assert (two.c7, two.c6, two.c5) == (17, 13, -2)


def test_crosscheck_flags_h0_tower(page_f2):
    # the regions are for X = H(1,4); over F2 the h0-tower must be caught
    reps = {r.name: r for r in vanishing_crosscheck(page_f2, stem_max=16)}
    bad = [r for name, r in reps.items() if name.startswith("tuple - ")]
    assert bad and (4, 4, 1) in bad[0].violations


def test_crosscheck_h14_small():
    page = e1_page(builtin("H14", get_slice("A2")), 1, 8, 32, x_name="H14")
    reps = vanishing_crosscheck(page, stem_max=20)
    assert len(reps) == len(page.tuples()) and all(r.passed for r in reps)


def test_truncate_comodule():
    c = truncate_comodule(n11_comodule(), 6)
    assert c.degrees == (0, 4, 6)
    c.check()


def test_change_of_rings_f2():
    from steenrod_ext.modules import trivial_comodule

    rep = change_of_rings_check(trivial_comodule(), t_max=14, w_name="F2")
    assert rep.passed, rep.mismatches
    assert rep.sub.total() > 0


def test_triple_ones_against_n11_cubed_bound():
    # Ext(N_1(1)^3 (x) H(1,4)) vanishes above (17, 8, -9); M_2(1)^3[-3] is Sigma^24 of it, shifted by 3
    from steenrod_ext.resolution import realize
    from steenrod_ext.tmf_resolution import tuple_ext
    from steenrod_ext.vanishing import Region, audit

    cx, _, _ = realize(builtin("H14", get_slice("A2")), 17, 64)
    tab = tuple_ext(cx, (1, 1, 1), stem_max=40)
    reg = Region(17, 8, -9).suspended(24, 3)
    assert (reg.c7, reg.c6, reg.c5) == (17, 5, -15)
    rep = audit(tab, reg, stem_max=40)
    assert rep.passed and rep.checked > 0
