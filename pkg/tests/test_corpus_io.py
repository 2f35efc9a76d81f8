import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from classbreadth import corpus
from classbreadth.actions import GroupSpec, Kind, perm_from_cycles
from classbreadth.errors import InvalidPrime, NotUnitriangular, OrderCapExceeded, ParseError
from classbreadth.fileformat import format_group_file, parse_group_file
from classbreadth.group import build_group, trivial_subgroup, whole_group
from classbreadth.report import CSV_HEADER, certificate_dict, emit_certificate, strip_timing, survey_csv
from classbreadth.series import breadth_profile, lower_central_ffunction, nilpotency_class
from classbreadth.theorems import class_breadth_check, theorem1, theorem2

from conftest import cayley
from oracle import PyGroup

GOLDEN = Path(__file__).parent / "golden"
GROUP_FILES = Path(__file__).parent.parent / "groups"

HEIS_TEXT = "p: 3\nkind: matrix\nn: 3\ngen a: 1 1 0; 0 1 0; 0 0 1\ngen b: 1 0 0; 0 1 1; 0 0 1\n"


# --- families ---------------------------------------------------------------------


@pytest.mark.parametrize("name,params,order", [
    ("heisenberg", (3,), 27),
    ("heisenberg", (5,), 125),
    ("unitriangular", (4, 3), 729),
    ("extraspecial", (3, 3), 27),
    ("extraspecial", (3, 9), 27),
    ("extraspecial", (5, 25), 125),
    ("wreath_cyclic", (3,), 81),
    ("elementary_abelian", (3, 4), 81),
])
def test_family_orders(name, params, order):
    spec = corpus.family(name, *params)
    assert corpus.spec_order(spec) == order
    assert build_group(spec).order == order


def test_elementary_abelian_3_2(ea9):
    assert ea9.order == 9
    assert nilpotency_class(ea9, whole_group(ea9)) == 1
    assert breadth_profile(ea9).max == 0


def test_wreath_order_against_permutation_oracle():
    O = PyGroup([perm_from_cycles([[0, 1, 2]], 9), perm_from_cycles([[0, 3, 6], [1, 4, 7], [2, 5, 8]], 9)], 3)
    assert O.order == 81 == 3 ** (3 + 1)


def test_extraspecial_exponents():
    for p in (3, 5):
        small = build_group(corpus.extraspecial(p, p))
        big = build_group(corpus.extraspecial(p, p * p))
        assert all(small.power(x, p) == 0 for x in range(small.order))
        assert any(big.power(x, p) != 0 for x in range(big.order))
        for G in (small, big):
            assert nilpotency_class(G, whole_group(G)) == 2


def test_direct_product_order_and_class():
    spec = corpus.direct_product(corpus.heisenberg(3), corpus.elementary_abelian(3, 1))
    G = build_group(spec)
    assert G.order == 81
    assert nilpotency_class(G, whole_group(G)) == 2


def test_family_cap():
    with pytest.raises(OrderCapExceeded):
        corpus.family("unitriangular", 5, 3, cap=1000)


def test_family_members_bounded():
    specs = corpus.family_members("unitriangular", 3, 729)
    assert [corpus.spec_order(s) for s in specs] == [3, 27, 729]


def test_standard_corpus_is_deterministic():
    a = [s.label for s in corpus.standard_corpus()]
    b = [s.label for s in corpus.standard_corpus()]
    assert a == b
    assert len(a) >= 10 + 20


# --- parser -----------------------------------------------------------------------


def test_parse_cyclic():
    spec = parse_group_file("p: 3\nkind: perm\ngen a: (1 2 3)")
    assert spec.kind == Kind.PERM and spec.generators == [(1, 2, 0)]
    assert build_group(spec).order == 3


def test_parse_heisenberg():
    assert build_group(parse_group_file(HEIS_TEXT)).order == 27


def test_parse_invalid_prime():
    with pytest.raises(InvalidPrime, match="line 1"):
        parse_group_file("p: 4\nkind: perm\ngen a: (1 2)")
    with pytest.raises(InvalidPrime):
        parse_group_file((GROUP_FILES / "p2_invalid.grp").read_text())


@pytest.mark.parametrize("text,line", [
    ("p: 3\nkind: perm\ngen a: (1 2 3) junk", 3),
    ("p: 3\nkind: perm\ngen a: (1 2 1)", 3),
    ("p: 3\nkind: perm\ngen a: (1 x)", 3),
    ("p: 3\nkind: ring\n", 2),
    ("p: 3\nkind: matrix\ngen a: 1 0; 0 1", 3),
    ("p: 3\nkind: matrix\nn: 2\ngen a: 1 0 0; 0 1 0", 4),
    ("p: 3\nkind: perm\ngen a: (1 2 3)\ngen a: (1 2 3)", 4),
    ("gen a: (1 2 3)", 1),
    ("p: 3\nkind: perm\nwhat is this", 3),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_group_file(text)
    assert info.value.line == line


def test_parse_not_unitriangular():
    with pytest.raises(NotUnitriangular, match="line 4"):
        parse_group_file("p: 3\nkind: matrix\nn: 2\ngen a: 1 0; 1 1\n")


def test_comments_and_blank_lines_ignored():
    text = "# header\n\np: 3   # prime\nkind: perm\n\ngen a: (1 2 3)  # a 3-cycle\n"
    assert parse_group_file(text).generators == [(1, 2, 0)]


@pytest.mark.parametrize("path", sorted(p for p in GROUP_FILES.glob("*.grp") if "invalid" not in p.name))
def test_round_trip_keeps_canonical_indices(path):
    spec = parse_group_file(path.read_text())
    again = parse_group_file(format_group_file(spec))
    G, H = build_group(spec), build_group(again)
    assert (cayley(G) == cayley(H)).all()
    assert [G.element_repr(i) for i in range(G.order)] == [H.element_repr(i) for i in range(H.order)]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.permutations(list(range(9))), min_size=1, max_size=3))
def test_format_parse_round_trip_permutations(perms):
    spec = GroupSpec(3, Kind.PERM, [tuple(p) for p in perms], degree=9, label="sample")
    again = parse_group_file(format_group_file(spec))
    # trailing fixed points are not written, so compare on the common prefix
    for a, b in zip(spec.generators, again.generators):
        assert a[:len(b)] == b and all(a[i] == i for i in range(len(b), len(a)))


# --- certificates and CSV ----------------------------------------------------------


def test_base_certificate_json(ea9):
    f = lower_central_ffunction(ea9)
    _, cert = theorem1(0, 1, ea9, f, whole_group(ea9), [trivial_subgroup(ea9)] * 2)
    data = json.loads(emit_certificate(cert, ea9))
    assert len(data["steps"]) == 1 and data["steps"][0]["case"] == "BASE"
    assert all(data["postconditions"][k] for k in ("B1", "B2", "B3", "B4"))


def test_heisenberg_certificate_matches_golden(heis3):
    _, cert = theorem2(heis3)
    assert emit_certificate(cert, heis3) == (GOLDEN / "heisenberg3_theorem2.json").read_text()


def test_certificate_schema(wreath3):
    _, cert = theorem2(wreath3)
    d = certificate_dict(cert, wreath3)
    assert set(d) == {"input", "steps", "result", "postconditions"}
    assert set(d["input"]) == {"group_label", "p", "order", "n", "m", "c_list"}
    for step in d["steps"]:
        assert {"case", "n", "m"} <= set(step)


def test_survey_csv_three_rows(ea9, heis3, wreath3):
    rows = [class_breadth_check(G) for G in (ea9, heis3, wreath3)]
    text = survey_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 4
    stripped = strip_timing(text)
    assert stripped[2] == ["heisenberg(3)", "3", "27", "1", "2", "true", "0", "2"]
    assert strip_timing(survey_csv(rows, timing=False)) == stripped
