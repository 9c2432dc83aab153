from __future__ import annotations

import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from steenrod_ext.chart import (
    ChartSpec,
    Differential,
    Dot,
    Line,
    chart_from_ext,
    emit,
    load_annotations,
    parse_chart_tsv,
)
from steenrod_ext.resolution import ExtTable


@pytest.mark.parametrize("fmt", ["tsv", "ascii", "svg"])
def test_empty_chart(fmt):
    spec = chart_from_ext(ExtTable(0, 0))
    assert spec.dots == []
    out = emit(spec, fmt)
    assert out
    if fmt == "svg":
        ET.fromstring(out.split("\n", 1)[1])


def test_a1_chart_lines(res_f2_a1):
    spec = chart_from_ext(res_f2_a1.ext_table())
    kinds = {ln.kind for ln in spec.lines}
    assert {"h0", "h1"} <= kinds
    # h1 from the unit to stem 1, h0 up the stem-0 tower
    assert Line((0, 0, 0), (1, 1, 0), "h1") in spec.lines
    assert Line((0, 0, 0), (0, 1, 0), "h0") in spec.lines
    assert Line((0, 0, 0), (3, 1, 0), "h2") not in spec.lines


def test_markers_from_caller():
    tab = ExtTable(2, 4, {(0, 0): 1, (1, 2): 1})
    spec = chart_from_ext(tab, markers={(1, 2, 0): "open"})
    assert [d.marker for d in spec.dots] == ["filled", "open"]
    spec2 = chart_from_ext(tab, markers=lambda s, t, i: "box")
    assert {d.marker for d in spec2.dots} == {"box"}


def test_annotations():
    tab = ExtTable(4, 12, {(0, 0): 1, (1, 2): 1, (3, 3): 1})
    spec = chart_from_ext(tab)
    text = "# comment\nd 2 1 1 0 0 3 0\nline annotation 0 0 0 1 1 0\nmark diamond 0 3 0\n"
    out = load_annotations(text, spec)
    assert out.differentials == [Differential((1, 1, 0), (0, 3, 0), 2)]
    assert any(ln.kind == "annotation" for ln in out.lines)
    assert [d.marker for d in out.dots if d.key == (0, 3, 0)] == ["diamond"]
    with pytest.raises(ValueError):
        load_annotations("d 2 9 9 0 0 3 0\n", spec)


def test_validate_rejects_bad_specs():
    with pytest.raises(ValueError):
        ChartSpec([Dot(0, 0, 0, "star")]).validate()
    with pytest.raises(ValueError):
        ChartSpec([Dot(0, 0, 0)], [Line((0, 0, 0), (1, 1, 0), "h1")]).validate()
    with pytest.raises(ValueError):
        emit(ChartSpec(), "pdf")


def test_determinism(res_f2_a1):
    tab = res_f2_a1.ext_table()
    for fmt in ("tsv", "ascii", "svg"):
        assert emit(chart_from_ext(tab), fmt) == emit(chart_from_ext(tab), fmt)


def test_svg_is_valid_xml(res_f2_a1):
    out = emit(chart_from_ext(res_f2_a1.ext_table(), title="A1 <F2>"), "svg")
    root = ET.fromstring(out.split("\n", 1)[1])
    assert root.tag.endswith("svg")
    assert len(root.findall(".//{http://www.w3.org/2000/svg}circle")) == res_f2_a1.ext_table().total()


cells = st.dictionaries(st.tuples(st.integers(0, 10), st.integers(0, 40)), st.integers(1, 3), max_size=25)


@settings(max_examples=50, deadline=None)
@given(cells)
def test_tsv_roundtrip(dims):
    dims = {(s, t): v for (s, t), v in dims.items() if t >= s}
    spec = chart_from_ext(ExtTable(10, 40, dims), title="x")
    back = parse_chart_tsv(emit(spec, "tsv"))
    assert back.dot_multiset() == spec.dot_multiset()
    assert emit(back, "tsv") == emit(spec, "tsv")
