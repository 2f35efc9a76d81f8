import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from classbreadth.errors import PreconditionViolated
from classbreadth.group import (
    center,
    centralizer,
    normal_subgroups,
    trivial_subgroup,
    whole_group,
)
from classbreadth.series import (
    FFunction,
    breadth_profile,
    breadth_rel,
    breadths,
    check_F_membership,
    cl_f,
    lower_central_ffunction,
    lower_central_series,
    nilpotency_class,
)

from conftest import build, cayley
from oracle import table_breadths, table_lower_central

# Pinned by tests/oracle.py (PyGroup on raw permutations / matrices), computed
# before these values were checked against the package.
WREATH3_BREADTH = 2
WREATH3_CLASS = 3
UT43_BREADTH = 3
UT43_CLASS = 3


def test_breadth_rel_examples(heis3):
    G = whole_group(heis3)
    z = int(center(heis3).members[1])
    assert breadth_rel(heis3, z, G) == 0
    assert breadth_rel(heis3, heis3.generators[0], trivial_subgroup(heis3)) == 0
    assert breadth_rel(heis3, heis3.generators[0], G) == 1


def test_breadth_profile_abelian(ea9):
    prof = breadth_profile(ea9)
    assert prof.max == 0 and not prof.per_element.any()


def test_breadth_profile_heisenberg(heis3):
    assert breadth_profile(heis3).max == 1
    assert (breadth_profile(heis3).per_element == table_breadths(cayley(heis3), 3)).all()


def test_breadth_profile_wreath(wreath3):
    assert breadth_profile(wreath3).max == WREATH3_BREADTH
    assert (breadth_profile(wreath3).per_element == table_breadths(cayley(wreath3), 3)).all()


def test_breadth_profile_ut43(ut43):
    assert breadth_profile(ut43).max == UT43_BREADTH


def test_relative_breadths_agree_with_per_element(wreath3):
    for N in normal_subgroups(wreath3):
        fast = breadths(wreath3, wreath3.all, N)
        slow = [breadth_rel(wreath3, g, N) for g in range(wreath3.order)]
        assert list(fast) == slow


def test_lower_central_series_examples(heis3, ea9):
    E = whole_group(ea9)
    assert lower_central_series(ea9, E) == [E, trivial_subgroup(ea9)]
    T = trivial_subgroup(heis3)
    assert lower_central_series(heis3, T) == [T]
    G = whole_group(heis3)
    assert lower_central_series(heis3, G) == [G, center(heis3), T]


def test_lower_central_series_matches_table_oracle(wreath3, ut43):
    for G in (wreath3, ut43):
        mine = [S.mask for S in lower_central_series(G, whole_group(G))]
        ref = table_lower_central(cayley(G))
        assert len(mine) == len(ref)
        assert all((a == b).all() for a, b in zip(mine, ref))


def test_nilpotency_class_examples(ea9, wreath3, ut43):
    assert nilpotency_class(ea9, trivial_subgroup(ea9)) == 0
    assert nilpotency_class(ea9, whole_group(ea9)) == 1
    assert nilpotency_class(wreath3, whole_group(wreath3)) == WREATH3_CLASS
    assert nilpotency_class(ut43, whole_group(ut43)) == UT43_CLASS


def test_lower_central_ffunction_examples(heis3):
    f = lower_central_ffunction(heis3)
    G = whole_group(heis3)
    T = trivial_subgroup(heis3)
    assert f(G, 1) == G
    assert all(f(T, i) == T for i in range(1, 5))
    assert f(G, 2) == center(heis3)
    assert f(G, 9) == T
    with pytest.raises(ValueError):
        f(G, 0)


def test_ffunction_memo_is_keyed_by_member_set(heis3):
    calls = []

    def fn(N, i):
        calls.append(i)
        return N

    f = FFunction(heis3, fn, "identity")
    G = whole_group(heis3)
    f(G, 1)
    f(whole_group(heis3), 1)
    from classbreadth.group import Subgroup
    f(Subgroup(heis3, np.ones(27, dtype=bool)), 1)
    assert calls == [1]


def test_membership_lower_central_heisenberg(heis3):
    rep = check_F_membership(lower_central_ffunction(heis3), normal_subgroups(heis3), depth=4)
    assert rep.passed and not rep.sampled
    assert "pass" in str(rep)


def test_membership_constant_function_fails_condition_two(heis3):
    G = whole_group(heis3)
    const = FFunction(heis3, lambda N, i: G, "constant")
    rep = check_F_membership(const, normal_subgroups(heis3), depth=3)
    assert not rep.passed
    assert rep.violation[0] == "condition 2"


def test_membership_vacuous_on_trivial_sample(heis3):
    const = FFunction(heis3, lambda N, i: whole_group(heis3), "constant")
    assert check_F_membership(const, [trivial_subgroup(heis3)], depth=1).passed


def test_membership_rejects_bad_depth(heis3):
    with pytest.raises(PreconditionViolated):
        check_F_membership(lower_central_ffunction(heis3), [], depth=0)


def test_membership_sampled_pairs(wreath3):
    rep = check_F_membership(lower_central_ffunction(wreath3), normal_subgroups(wreath3), depth=4, pair_cap=5)
    assert rep.passed and rep.sampled and rep.pairs_checked == 5


def test_cl_f_examples(heis3, ea9):
    f = lower_central_ffunction(heis3)
    assert cl_f(f, trivial_subgroup(heis3)) == 1
    assert cl_f(lower_central_ffunction(ea9), whole_group(ea9)) == 1
    assert cl_f(f, whole_group(heis3)) == 2


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("wreath_cyclic", 3), ("heisenberg", 5), ("extraspecial", 3, 9)]), st.data())
def test_cl_f_is_class_plus_zero_or_one(params, data):
    """For lower-central f, γ_n(N) ⊆ Z_G(N) sits between cl(N) and cl(N) + 1."""
    G = _cached(params)
    N = data.draw(st.sampled_from(normal_subgroups(G)))
    f = lower_central_ffunction(G)
    c = cl_f(f, N)
    k = nilpotency_class(G, N)
    assert max(k, 1) <= c <= k + 1
    assert f(N, c) <= centralizer(G, N)


_GROUPS = {}


def _cached(params):
    if params not in _GROUPS:
        _GROUPS[params] = build(*params)
    return _GROUPS[params]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("wreath_cyclic", 3), ("heisenberg", 5)]), st.data())
def test_relative_breadth_is_monotone_in_the_subgroup(params, data):
    G = _cached(params)
    Ns = normal_subgroups(G)
    A = data.draw(st.sampled_from(Ns))
    B = data.draw(st.sampled_from([M for M in Ns if A <= M]))
    assert (breadths(G, G.all, A) <= breadths(G, G.all, B)).all()
