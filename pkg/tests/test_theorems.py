import random

import pytest
from hypothesis import given, settings, strategies as st

from classbreadth.errors import InvalidPrime, PreconditionViolated, TrivialGroup
from classbreadth.actions import GroupSpec, Kind
from classbreadth.group import (
    build_group,
    center,
    index_log,
    is_normal,
    normal_subgroups,
    trivial_subgroup,
    whole_group,
)
from classbreadth.series import breadth_profile, breadths, lower_central_ffunction, nilpotency_class
from classbreadth.theorems import (
    BASE,
    CASE_A,
    CASE_B,
    CAVEAT,
    CENTRAL,
    audit_certificate,
    class_breadth_check,
    cl_restricted,
    conjecture_report,
    k_restricted_bounds,
    prop1_covering,
    random_theorem1_instance,
    theorem1,
    theorem2,
    theorem3,
)

from conftest import build, cayley
from oracle import table_breadths, table_lower_central


def trivial_list(G):
    return [trivial_subgroup(G)] * (G.prime - 1)


# --- theorem1 -------------------------------------------------------------------


def test_theorem1_base_case(ea9):
    f = lower_central_ffunction(ea9)
    E = whole_group(ea9)
    N, cert = theorem1(0, 1, ea9, f, E, trivial_list(ea9))
    assert N == E
    assert cert.cases == [BASE]
    assert cert.accepted


def test_theorem1_heisenberg_trace(heis3):
    f = lower_central_ffunction(heis3)
    G = whole_group(heis3)
    N, cert = theorem1(1, 1, heis3, f, G, trivial_list(heis3))
    assert N == G
    assert cert.cases == [CASE_A, BASE]
    first, second = cert.steps
    assert first.P == center(heis3)
    assert (second.n, second.m) == (0, 2)
    assert second.Cs[1].is_trivial()  # <C1 ∪ C2> for two trivial C's
    assert cert.postconditions["cl_f"] == 2
    assert audit_certificate(heis3, f, cert) == []


def test_theorem1_central_case(heis3):
    f = lower_central_ffunction(heis3)
    Z = center(heis3)
    N, cert = theorem1(1, 1, heis3, f, Z, trivial_list(heis3))
    assert N == Z and cert.cases == [CENTRAL]


def test_theorem1_reaches_case_b(wreath3):
    """A C-list whose first two members generate H forces the split case."""
    f = lower_central_ffunction(wreath3)
    G = whole_group(wreath3)
    maxi = [N for N in normal_subgroups(wreath3) if index_log(G, N) == 1]
    Cs = [maxi[0], maxi[1]]
    n = int(breadths(wreath3, [x for x in range(wreath3.order) if not (Cs[0].mask[x] or Cs[1].mask[x])],
                     f(G, 1)).max())
    N, cert = theorem1(n, 1, wreath3, f, G, Cs)
    assert cert.cases[0] == CASE_B
    rec = cert.steps[0]
    assert rec.D1 != rec.D2 and index_log(G, rec.D) == 1
    assert audit_certificate(wreath3, f, cert) == []


def test_theorem1_rejects_c_containing_h(heis3):
    f = lower_central_ffunction(heis3)
    G = whole_group(heis3)
    with pytest.raises(PreconditionViolated):
        theorem1(1, 1, heis3, f, G, [G, trivial_subgroup(heis3)])


def test_theorem1_rejects_wrong_list_length(heis3):
    f = lower_central_ffunction(heis3)
    with pytest.raises(PreconditionViolated):
        theorem1(1, 1, heis3, f, whole_group(heis3), [trivial_subgroup(heis3)])


def test_theorem1_rejects_failed_hypothesis(heis3):
    f = lower_central_ffunction(heis3)
    with pytest.raises(PreconditionViolated):
        theorem1(0, 1, heis3, f, whole_group(heis3), trivial_list(heis3))


def test_audit_catches_tampering(heis3):
    f = lower_central_ffunction(heis3)
    _, cert = theorem1(1, 1, heis3, f, whole_group(heis3), trivial_list(heis3))
    cert.steps[0].P = whole_group(heis3)
    assert any("P differs" in p for p in audit_certificate(heis3, f, cert))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("wreath_cyclic", 3), ("heisenberg", 5), ("extraspecial", 3, 9)]),
       st.integers(0, 2**32 - 1))
def test_theorem1_random_instances_audit_clean(params, seed):
    G = _cached(params)
    f = lower_central_ffunction(G)
    n, m, H, Cs = random_theorem1_instance(G, normal_subgroups(G), random.Random(seed), f=f)
    N, cert = theorem1(n, m, G, f, H, Cs)
    assert N <= H and is_normal(G, N)
    assert index_log(H, N) <= n
    assert any(not any(C.mask[x] for C in Cs) for x in N.members)
    assert audit_certificate(G, f, cert) == []


_GROUPS = {}


def _cached(params):
    if params not in _GROUPS:
        _GROUPS[params] = build(*params)
    return _GROUPS[params]


# --- theorem2 -------------------------------------------------------------------


def test_theorem2_abelian(ea9):
    N, cert = theorem2(ea9)
    assert N.is_whole() and cert.postconditions["index_log"] == 0
    assert nilpotency_class(ea9, N) == 1


def test_theorem2_heisenberg(heis3):
    N, cert = theorem2(heis3)
    assert N.is_whole()
    assert cert.cases == [CASE_A, BASE]
    assert nilpotency_class(heis3, N) == 2


def test_theorem2_wreath_against_table_oracle(wreath3):
    N, cert = theorem2(wreath3)
    assert cert.accepted
    T = cayley(wreath3)
    b = int(table_breadths(T, 3).max())
    assert index_log(whole_group(wreath3), N) <= b
    assert nilpotency_class(wreath3, N) <= b + 1


def test_theorem2_errors():
    with pytest.raises(TrivialGroup):
        theorem2(build_group(GroupSpec(3, Kind.PERM, [], [], degree=1)))


# --- theorem3 -------------------------------------------------------------------


def test_theorem3_abelian(ea9):
    res = theorem3(ea9, trivial_list(ea9), 0)
    assert res.N.is_whole() and res.l == 0


def test_theorem3_heisenberg(heis3):
    res = theorem3(heis3, trivial_list(heis3), 1)
    assert res.l <= 2 and len(res.chain) <= 3
    assert res.cl <= 1 + res.interior_max


def test_theorem3_ut43(ut43):
    n = breadth_profile(ut43).max
    res = theorem3(ut43, trivial_list(ut43), n)
    assert res.l <= n + 1
    assert index_log(whole_group(ut43), res.N) <= n * (n + 2)
    assert res.cl <= 1 + res.interior_max
    assert not res.N.is_trivial()


def test_theorem3_rejects_small_n(heis3):
    with pytest.raises(PreconditionViolated):
        theorem3(heis3, trivial_list(heis3), 0)


# --- covering, restricted Cl and K ------------------------------------------------


def test_prop1_abelian(ea9):
    rep = prop1_covering(ea9, lower_central_ffunction(ea9))
    assert all(NC.is_whole() for _, NC in rep.family)
    assert rep.product_is_G and rep.intersection_central and rep.passed


def test_prop1_heisenberg(heis3):
    rep = prop1_covering(heis3, lower_central_ffunction(heis3))
    assert len(rep.family) == 6
    assert rep.product_is_G and rep.intersection <= center(heis3) and rep.passed


def test_prop1_sampled_when_lattice_exceeds_cap():
    E = build("elementary_abelian", 3, 3)
    rep = prop1_covering(E, lower_central_ffunction(E), cap=5)
    assert rep.sampled


def test_cl_restricted_examples(ea9, heis3):
    assert cl_restricted(ea9, lower_central_ffunction(ea9)) == 1
    assert cl_restricted(heis3, lower_central_ffunction(heis3)) == 2


def test_k_bounds_heisenberg(heis3):
    k = k_restricted_bounds(heis3, lower_central_ffunction(heis3))
    assert k.lower <= center(heis3)
    assert k.exact is not None and k.exact <= center(heis3)
    assert k.lower <= k.exact


def test_k_bounds_abelian(ea9):
    k = k_restricted_bounds(ea9, lower_central_ffunction(ea9))
    assert k.lower_central and k.exact_central


def test_k_bounds_exact_skipped_over_subset_cap(heis3):
    k = k_restricted_bounds(heis3, lower_central_ffunction(heis3), subset_cap=2)
    assert k.qualifying > 2 and k.exact is None


def test_conjecture_report_heisenberg(heis3):
    rep = conjecture_report(heis3, lower_central_ffunction(heis3))
    assert rep.cl == 2 and rep.cl_restricted == 2 and rep.conj1_consistent
    assert rep.gamma_next.is_trivial()
    assert all(CAVEAT in line for line in rep.lines()[1:])


def test_conjecture_report_abelian(ea9):
    rep = conjecture_report(ea9, lower_central_ffunction(ea9))
    assert rep.cl == 1 and rep.cl_restricted == 1 and rep.gamma_next.is_trivial()


def test_conjecture_report_wreath_is_restricted_evidence_only(wreath3):
    """Restricted Cl can fall below cl; the report flags this without drawing a conclusion."""
    rep = conjecture_report(wreath3, lower_central_ffunction(wreath3))
    assert rep.cl == 3 and rep.cl_restricted == 2 and rep.conj1_consistent is False
    assert all(CAVEAT in line for line in rep.lines()[1:])


def test_conjecture_report_sampled():
    E = build("elementary_abelian", 3, 3)
    rep = conjecture_report(E, lower_central_ffunction(E), cap=5)
    assert rep.sampled and "sampled" in rep.lines()[1]


# --- class_breadth_check ----------------------------------------------------------


def test_class_breadth_rows(ea9, heis3, ut43):
    row = class_breadth_check(ea9)
    assert (row.cls, row.breadth, row.status) == (1, 0, True)
    row = class_breadth_check(heis3)
    assert (row.cls, row.breadth, row.status) == (2, 1, True)
    row = class_breadth_check(ut43)
    T = cayley(ut43)
    assert row.breadth == int(table_breadths(T, 3).max())
    assert row.cls == len(table_lower_central(T)) - 1 == 3
    assert row.status and row.t2_ok


def test_class_breadth_rejects_p2():
    from classbreadth.group import GroupTable
    import numpy as np
    G = GroupTable(2, np.array([0, 1], dtype=np.int32), [1], table=np.array([[0, 1], [1, 0]], dtype=np.int32))
    with pytest.raises(InvalidPrime):
        class_breadth_check(G)
