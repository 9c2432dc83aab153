from __future__ import annotations

import numpy as np
import pytest

from steenrod_ext.modules import (
    BUILTINS,
    Cone,
    ModuleError,
    Plain,
    builtin,
    comodule_tensor,
    direct_sum,
    dualize,
    dumps_module,
    h1_comodule,
    loads_module,
    module_from_comodule,
    reindex,
    restrict,
    suspend_shift,
    tensor,
    tensor_power,
    trivial_comodule,
)
from steenrod_ext.steenrod import get_slice

JOKER = """\
gen a 0
gen b 1
gen c 2
gen d 3
gen e 4
act Sq^1 a = b
act Sq^2 a = c
act Sq^2 b = d
act Sq^1 d = e
act Sq^2 c = e
"""


def test_h1_action():
    h1 = builtin("H1", get_slice("A2"))
    assert h1.act((1,), 0) == (1,)
    assert h1.act((1,), 1) == ()
    assert h1.dims_by_degree() == {0: 1, 1: 1}


def test_builtins_validate():
    for sl in (get_slice("A1"), get_slice("A2")):
        for name in BUILTINS:
            obj = builtin(name, sl)
            if not isinstance(obj, (Cone, Plain)) and hasattr(obj, "validate"):
                obj.validate()


def test_m21_needs_a2():
    with pytest.raises(ValueError):
        builtin("M21", get_slice("A", 20))
    with pytest.raises(KeyError):
        builtin("nope")


def test_comodule_checks():
    h1_comodule().check()
    comodule_tensor(h1_comodule(), h1_comodule()).check()
    bad = type(h1_comodule())(("x0", "x1"), (0, 1), ((((), 0),), (((), 1), ((2,), 0))))
    with pytest.raises(ModuleError):
        bad.check()


def test_loads_dumps_roundtrip():
    a1 = get_slice("A1")
    m = loads_module(JOKER, a1, name="J")
    m2 = loads_module(dumps_module(m), a1, name="J")
    assert m.labels == m2.labels and m.degrees == m2.degrees
    assert set(m.action) == set(m2.action)
    for r in m.action:
        assert np.array_equal(m.matrix(r), m2.matrix(r))


def test_loads_rejects_bad_input():
    a1 = get_slice("A1")
    with pytest.raises(ModuleError):
        loads_module("gen a 0\ngen b 1\nact Sq^3 a = b\n", a1)
    with pytest.raises(ModuleError):
        loads_module("gen a 0\ngen b 2\nact Sq^1 a = b\n", a1)
    with pytest.raises(ModuleError):
        loads_module("gen a 0\nfrobnicate\n", a1)
    # Sq1 Sq1 = 0 is violated
    with pytest.raises(ModuleError):
        loads_module("gen a 0\ngen b 1\ngen c 2\nact Sq^1 a = b\nact Sq^1 b = c\n", a1)


def test_dualize_involution():
    a2 = get_slice("A2")
    m = loads_module(JOKER, get_slice("A1")).restrict(get_slice("A0"))
    for mod in (builtin("H1", a2), builtin("Ceta", a2), m):
        dd = dualize(dualize(mod))
        assert dd.degrees == mod.degrees
        for r in set(mod.action) | set(dd.action):
            assert np.array_equal(dd.matrix(r), mod.matrix(r))


def test_tensor_and_sum_shapes():
    a2 = get_slice("A2")
    h1 = builtin("H1", a2)
    t = tensor(h1, h1)
    t.validate()
    assert t.dims_by_degree() == {0: 1, 1: 2, 2: 1}
    assert tensor_power(h1, 3).dim == 8
    s = direct_sum(h1, builtin("Ceta", a2))
    s.validate()
    assert s.dim == 4


def test_module_from_comodule_span_limit():
    c = comodule_tensor(trivial_comodule(0), trivial_comodule(0))
    assert module_from_comodule(c, get_slice("A", 4)).dim == 1
    wide = type(c)(("a", "b"), (0, 30), ((((), 0),), (((), 1),)))
    with pytest.raises(ValueError):
        module_from_comodule(wide, get_slice("A", 10))


def test_restrict_drops_operations():
    h1 = builtin("Ceta", get_slice("A2"))
    r = restrict(h1, get_slice("A0"))
    assert not r.action
    with pytest.raises(ValueError):
        restrict(builtin("F2", get_slice("A1")), get_slice("A2"))


def test_shift_conventions():
    x = suspend_shift(builtin("H1"), 12, -4)
    assert (x.t_shift, x.s_shift) == (12, -4)
    assert reindex({(1, 2): 1}, 12, -4) == {(5, 14): 1}
