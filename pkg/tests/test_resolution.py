from __future__ import annotations

import numpy as np
import pytest

from steenrod_ext.modules import Cone, GradedModule, Plain, builtin
from steenrod_ext.resolution import (
    ExtTable,
    ResolutionError,
    cobar_ext_oracle,
    cone_les_check,
    ext_basis,
    ext_between,
    ext_of,
    hi_class,
    identity_class,
    lift_chain_map,
    mapping_cone,
    minimal_resolution,
    module_generator_degrees,
    realize,
    yoneda_product,
)
from steenrod_ext.steenrod import get_slice


def coords(x):
    return ext_basis(x.res, x.s, x.t, x.target).coordinates(x.cocycle)


def stems(tab, stem_max):
    return sorted((t - s, s) for (s, t), v in tab.dims.items() if v and t - s <= stem_max)


def test_a0_tower():
    tab = minimal_resolution(builtin("F2", get_slice("A0")), 10, 20).ext_table()
    assert tab.nonzero() == [((s, s), 1) for s in range(11)]


def test_a1_ko_pattern(res_f2_a1):
    tab = res_f2_a1.ext_table()
    low = stems(tab, 8)
    assert (1, 1) in low and (2, 2) in low and (3, 3) not in low
    assert [s for u, s in low if u == 4] == list(range(3, 13))
    assert [s for u, s in low if u == 8] == list(range(4, 13))
    assert not [u for u, _ in low if u in (5, 6, 7)]


def test_empty_module():
    m = GradedModule(get_slice("A2"), [], [], {})
    assert minimal_resolution(m, 5, 10).ext_table().dims == {}


def test_resolution_self_checks(res_f2_a2):
    assert res_f2_a2.check() == []
    h1 = minimal_resolution(builtin("H1", get_slice("A1")), 6, 20)
    assert h1.check() == []


def test_threads_give_identical_resolutions():
    m = builtin("H1", get_slice("A2"))
    one = minimal_resolution(m, 6, 24, threads=1, use_cache=False)
    four = minimal_resolution(m, 6, 24, threads=4, use_cache=False)
    assert one.degrees == four.degrees
    for a, b in zip(one.images, four.images):
        assert all(np.array_equal(x, y) for x, y in zip(a, b))


@pytest.mark.parametrize("algebra,over", [("A1", 1), ("A2", 2)])
@pytest.mark.parametrize("name", ["F2", "H1"])
def test_matches_cobar_oracle(algebra, over, name):
    from steenrod_ext.modules import h1_comodule, trivial_comodule

    sl = get_slice(algebra)
    co = trivial_comodule() if name == "F2" else h1_comodule()
    tab = minimal_resolution(builtin(name, sl), 6, 12).ext_table()
    ora = cobar_ext_oracle(co, 5, 12, over)
    assert tab.restricted(5, 12).same_dims(ora)


def test_oracle_over_full_algebra():
    from steenrod_ext.modules import trivial_comodule

    tab = minimal_resolution(builtin("F2", get_slice("A", 10)), 4, 10).ext_table()
    ora = cobar_ext_oracle(trivial_comodule(), 3, 10, None)
    assert tab.restricted(3, 10).same_dims(ora)
    assert ora.dim(1, 8) == 1 and ora.dim(2, 8) == 1 and ora.dim(2, 6) == 0


def test_oracle_cap():
    from steenrod_ext.modules import trivial_comodule

    with pytest.raises(ResolutionError):
        cobar_ext_oracle(trivial_comodule(), 6, 14, None, cap=50)


def test_window_errors():
    a2 = get_slice("A2")
    with pytest.raises(ResolutionError):
        minimal_resolution(builtin("M21", a2), 3, 7)
    with pytest.raises(ResolutionError):
        minimal_resolution(builtin("F2", get_slice("A", 10)), 3, 12)


def test_module_generators():
    a2 = get_slice("A2")
    assert module_generator_degrees(builtin("H1", a2)) == {0: 1}
    # cyclic: Sq(4), Sq(2), Sq(1) walk up from the bottom class
    assert module_generator_degrees(builtin("M21", a2)) == {8: 1}


def test_identity_lifts_to_identity(res_f2_a2):
    f = lift_chain_map(identity_class(res_f2_a2), res_f2_a2)
    for j in range(3):
        for g in range(len(res_f2_a2.degrees[j])):
            assert f.entries(j, g) == {g: ((),)}


def test_h0_lift_starts_with_sq1(res_f2_a2):
    f = lift_chain_map(hi_class(res_f2_a2, 0), res_f2_a2, s_max=2)
    g = res_f2_a2.gens_at(1, 1)[0]
    assert res_f2_a2.entries(1, g) == {0: ((1,),)}
    # f_0 sends the h0 generator to the unit, f_1 sends h0^2 to the h0 generator
    assert f.entries(0, g) == {0: ((),)}
    h = res_f2_a2.gens_at(2, 2)[0]
    assert f.entries(1, h) == {g: ((),)}


def test_products_over_a2(res_f2_a2):
    h0, h1, h2 = (hi_class(res_f2_a2, i) for i in range(3))
    assert yoneda_product(h0, h1).is_zero()
    assert not yoneda_product(h0, h2).is_zero()
    assert yoneda_product(h1, h2).is_zero()
    h1cubed = yoneda_product(h1, yoneda_product(h1, h1))
    assert not h1cubed.is_zero()
    assert yoneda_product(h1, h1cubed).is_zero()


def test_yoneda_associative(res_f2_a2):
    h0, h1, h2 = (hi_class(res_f2_a2, i) for i in range(3))
    for x, y, z in [(h0, h0, h2), (h1, h1, h1), (h0, h2, h2), (h2, h0, h1)]:
        left = yoneda_product(yoneda_product(x, y), z)
        right = yoneda_product(x, yoneda_product(y, z))
        assert np.array_equal(coords(left), coords(right))


def test_products_full_algebra(res_f2_full):
    h0, h1 = hi_class(res_f2_full, 0), hi_class(res_f2_full, 1)
    assert yoneda_product(h0, h1).is_zero()
    h1cubed = yoneda_product(h1, yoneda_product(h1, h1))
    assert not h1cubed.is_zero()
    assert yoneda_product(h1, h1cubed).is_zero()


def test_hi_ledger_matches_yoneda(res_f2_a2):
    prods = res_f2_a2.hi_products(2)
    g = res_f2_a2.gens_at(1, 1)[0]
    assert prods.get((1, 1, g))  # h2 h0 != 0
    assert not res_f2_a2.hi_products(2).get((1, 2, res_f2_a2.gens_at(1, 2)[0]))


def test_cone_h0_is_h1():
    a2 = get_slice("A2")
    f2 = builtin("F2", a2)
    cone = Cone("h0", 1, 1, Plain(f2, 1, -1), Plain(f2))
    got = ext_of(cone, 6, 24)
    direct = minimal_resolution(builtin("H1", a2), 6, 24).ext_table()
    assert got.restricted(5, 24).same_dims(direct.restricted(5, 24))
    cx, _, _ = realize(cone, 6, 24)
    mini = cx.minimize()
    assert mini.is_minimal()
    assert mini.check_d_squared() == []
    assert mini.ext_table().restricted(5, 24).same_dims(got.restricted(5, 24))


def test_cone_of_zero_is_a_sum():
    a2 = get_slice("A2")
    f2 = builtin("F2", a2)
    got = ext_of(Cone("zero", 1, 1, Plain(f2, 1, -1), Plain(f2)), 6, 20).restricted(5, 20)
    base = minimal_resolution(f2, 6, 20).ext_table()
    expect = {}
    for (s, t), v in base.dims.items():
        for key in [(s, t), (s, t + 1)]:
            if key[0] <= 5 and key[1] <= 20:
                expect[key] = expect.get(key, 0) + v
    assert got.same_dims(ExtTable(5, 20, expect))


def test_cone_les(res_f2_a2):
    f = lift_chain_map(hi_class(res_f2_a2, 2), res_f2_a2)
    cx = mapping_cone(f)
    rep = cone_les_check(f, cx.ext_table())
    assert rep.passed and rep.checked > 0


def test_v1_4_unique_over_a1():
    h1 = builtin("H1", get_slice("A1"))
    tab = ext_between(h1, h1, 5, 14)
    assert tab.dim(4, 12) == 1


def test_tsv_roundtrip(res_f2_a1):
    tab = res_f2_a1.ext_table()
    back = ExtTable.from_tsv(tab.to_tsv())
    assert back.same_dims(tab)
    assert (back.s_max, back.t_max) == (tab.s_max, tab.t_max)
    with pytest.raises(ValueError):
        ExtTable.from_tsv("s\tt\tdim\n1\t2\n")


def test_reindex_convention():
    tab = ExtTable(3, 10, {(1, 2): 1})
    moved = tab.reindexed(12, -4)
    assert moved.dims == {(5, 14): 1}
    assert (moved.s_max, moved.t_max) == (7, 22)


def test_disk_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("STEENROD_EXT_CACHE", str(tmp_path))
    m = builtin("Ceta", get_slice("A2"))
    first = minimal_resolution(m, 5, 20)
    assert list(tmp_path.glob("res-*.npz"))
    second = minimal_resolution(m, 5, 20)
    assert first.degrees == second.degrees
    for a, b in zip(first.images, second.images):
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert second.check() == []


@pytest.mark.parametrize("w_name", ["N11", "H1", "DH1", "M21"])
@pytest.mark.parametrize("x_name", ["F2", "H1"])
def test_tensor_ext_matches_direct(w_name, x_name):
    from steenrod_ext.modules import tensor

    a2 = get_slice("A2")
    w, x = builtin(w_name, a2), builtin(x_name, a2)
    cx = minimal_resolution(x, 6, 30).as_complex()
    got = cx.tensor_ext(w)
    direct = minimal_resolution(tensor(w, x), 6, got.t_max).ext_table()
    assert got.restricted(5, got.t_max).same_dims(direct.restricted(5, got.t_max))
