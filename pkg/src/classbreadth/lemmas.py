"""Normal-subgroup constructions used inside the Theorem 1 recursion.

* :func:`lemma1_P` -- the subgroup of elements whose commutators with ``C2``
  already fall into ``[C1, N]``.
* :func:`lemma2_refine` -- a normal subgroup of index p between ``C1 ⊊ C2``.
* :func:`lemma4_select` -- an index-p normal subgroup of ``H`` meeting two
  given ones in their intersection and avoiding a short list of subgroups.

Every function re-checks its conclusions before returning and raises
:class:`InternalContradiction` if one fails.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np

from .errors import InternalContradiction, NotElementaryAbelian, PreconditionViolated, SelectionExhausted
from .group import (
    GroupTable,
    Subgroup,
    _closure,
    centralizer,
    commutator,
    commutator_subgroup,
    image,
    index_log,
    is_normal,
    join,
    preimage,
    product_of_normals,
    pth_power_subgroup,
    quotient,
    whole_group,
)
from .series import breadths

_CHUNK = 1 << 22


def _require_normal(G: GroupTable, *subs: Subgroup) -> None:
    for S in subs:
        if not is_normal(G, S):
            raise PreconditionViolated("argument is not a normal subgroup of G")


def commutators_land_in(G: GroupTable, gs: np.ndarray, C: Subgroup, K: Subgroup) -> np.ndarray:
    """Boolean per g in ``gs``: is ``[g, C] ⊆ K``."""
    cs = C.members
    out = np.empty(gs.size, dtype=bool)
    step = max(1, _CHUNK // max(1, cs.size))
    for s in range(0, gs.size, step):
        vals = commutator(G, gs[s:s + step, None], cs[None, :])
        out[s:s + step] = K.mask[vals].all(axis=1)
    return out


def lemma1_P(G: GroupTable, N: Subgroup, C1: Subgroup, C2: Subgroup) -> Subgroup:
    """``P = {g in N : [g, C2] ⊆ [C1, N]}`` by exhaustive membership test.

    Results are memoized on ``G``: the theorem 1 recursion asks for the same
    triple many times when it is run once per normal subgroup.
    """
    return G.cached(("lemma1", N.key, C1.key, C2.key), lambda: _lemma1_P(G, N, C1, C2))


def _lemma1_P(G: GroupTable, N: Subgroup, C1: Subgroup, C2: Subgroup) -> Subgroup:
    _require_normal(G, N, C1, C2)
    if not C1 <= C2:
        raise PreconditionViolated("lemma1_P needs C1 ⊆ C2")
    K = commutator_subgroup(G, C1, N)
    ns = N.members
    mask = np.zeros(G.order, dtype=bool)
    mask[ns[commutators_land_in(G, ns, C2, K)]] = True
    P = Subgroup(G, mask)

    # claim 1: elements whose breadth does not grow from C1 to C2 lie in P
    b1 = breadths(G, ns, C1)
    b2 = breadths(G, ns, C2)
    if not P.mask[ns[b1 >= b2]].all():
        raise InternalContradiction("lemma 1 claim 1 fails")
    # claim 2: P is the preimage of a centralizer in G/[C1, N], intersected with N
    pi = quotient(G, K)
    via_quotient = preimage(pi, centralizer(pi.target, image(pi, C2))) & N
    if via_quotient != P or not is_normal(G, P):
        raise InternalContradiction("lemma 1 claim 2 fails")
    # claim 3
    if P == N and K != commutator_subgroup(G, C2, N):
        raise InternalContradiction("lemma 1 claim 3 fails")
    return P


def _check_elementary_abelian(G: GroupTable, C2: Subgroup, V: Subgroup) -> None:
    if not V <= C2:
        raise PreconditionViolated("V must be contained in C2")
    gens = np.asarray(C2.generators, dtype=np.int64)
    if gens.size == 0:
        return
    comms = commutator(G, gens[:, None], gens[None, :])
    if not V.mask[comms].all():
        raise NotElementaryAbelian("C2/V is not abelian")
    if not V.mask[G.power(gens, G.prime)].all():
        raise NotElementaryAbelian("C2/V has exponent larger than p")


def _coordinates(G: GroupTable, C2: Subgroup, V: Subgroup) -> tuple[list[int], np.ndarray]:
    """F_p-basis of ``C2/V`` (greedy by index) and coordinates of every element.

    Rows of the coordinate array for elements outside C2 are left at -1.
    """
    basis: list[int] = []
    cur = V.mask.copy()
    cur_gens = list(V.generators)
    while True:
        rest = np.flatnonzero(C2.mask & ~cur)
        if rest.size == 0:
            break
        x = int(rest[0])
        cur = _closure(G, [x], cur, cur_gens)
        cur_gens.append(x)
        basis.append(x)
    d = len(basis)
    p = G.prime
    coords = np.full((G.order, d), -1, dtype=np.int64)
    vm = V.members
    powers = [[0] + [G.power(b, k) for k in range(1, p)] for b in basis]
    for vec in itertools.product(range(p), repeat=d):
        e = 0
        for i, k in enumerate(vec):
            if k:
                e = G.mul(e, powers[i][k])
        coords[G.mul(e, vm)] = vec
    return basis, coords


def hyperplanes(G: GroupTable, C2: Subgroup, V: Subgroup) -> Iterator[Subgroup]:
    """Index-p subgroups of C2 containing V, in dual-vector order.

    Coordinates come from a basis of ``C2/V`` chosen greedily by element
    index; each hyperplane is the kernel of a dual vector whose first nonzero
    entry is 1, taken in lexicographic order.
    """
    _check_elementary_abelian(G, C2, V)
    basis, coords = _coordinates(G, C2, V)
    d = len(basis)
    p = G.prime
    ms = C2.members
    sub = coords[ms]
    for w in itertools.product(range(p), repeat=d):
        nz = [x for x in w if x]
        if not nz or nz[0] != 1:
            continue
        ker = (sub @ np.asarray(w, dtype=np.int64)) % p == 0
        mask = np.zeros(G.order, dtype=bool)
        mask[ms[ker]] = True
        yield Subgroup(G, mask)


def maximal_subgroups_through(G: GroupTable, C2: Subgroup, V: Subgroup) -> list[Subgroup]:
    """All index-p subgroups of C2 that contain V, sorted by member list."""
    return sorted(hyperplanes(G, C2, V), key=lambda S: tuple(int(x) for x in S.members))


def frattini(G: GroupTable, H: Subgroup) -> Subgroup:
    """``[H, H] H^p``, the intersection of the maximal subgroups of H."""
    return join(G, commutator_subgroup(G, H, H), pth_power_subgroup(G, H))


def lemma2_refine(G: GroupTable, C1: Subgroup, C2: Subgroup) -> Subgroup:
    """Normal ``C3`` with ``C1 ⊆ C3 ⊆ C2`` and ``|C2 : C3| = p``."""
    _require_normal(G, C1, C2)
    if not (C1 <= C2 and C1 != C2):
        raise PreconditionViolated("lemma2_refine needs C1 ⊊ C2")
    K = product_of_normals(G, [C1, commutator_subgroup(G, C2, whole_group(G))], check_setwise=False)
    if K == C2:
        raise InternalContradiction("C1[C2, G] is not proper in C2")
    V = join(G, K, pth_power_subgroup(G, C2))
    C3 = next(hyperplanes(G, C2, V))
    if not (C1 <= C3 and C3 <= C2 and index_log(C2, C3) == 1 and is_normal(G, C3)):
        raise InternalContradiction("lemma 2 conclusion fails")
    return C3


def lemma4_select(G: GroupTable, H: Subgroup, D1: Subgroup, D2: Subgroup,
                  avoid: Sequence[Subgroup]) -> Subgroup:
    """Index-p normal ``D ≤ H`` with ``D ∩ D1 = D ∩ D2 = D1 ∩ D2`` avoiding ``avoid``.

    Candidates are the p+1 hyperplanes of ``H/(D1 ∩ D2) ≅ Z_p ⊕ Z_p``; the
    first (in dual-vector order) that differs from D1, D2 and lies in no
    member of ``avoid`` is returned.
    """
    p = G.prime
    _require_normal(G, H, D1, D2)
    if D1 == D2:
        raise PreconditionViolated("D1 and D2 must differ")
    for D in (D1, D2):
        if not D <= H or index_log(H, D) != 1:
            raise PreconditionViolated("D1, D2 must be index-p subgroups of H")
    if len(avoid) > p - 2:
        raise PreconditionViolated(f"at most p - 2 = {p - 2} subgroups may be avoided")
    for A in avoid:
        if not (A <= H and A != H):
            raise PreconditionViolated("avoided subgroups must be proper subgroups of H")
    V = D1 & D2
    chosen = None
    for D in hyperplanes(G, H, V):
        if D == D1 or D == D2:
            continue
        if any(D <= A for A in avoid):
            continue
        chosen = D
        break
    if chosen is None:
        raise SelectionExhausted("no admissible hyperplane")
    D = chosen
    ok = (index_log(H, D) == 1 and (D & D1) == V and (D & D2) == V
          and all(not D <= A for A in avoid) and is_normal(G, D))
    if not ok:
        raise InternalContradiction("lemma 4 conclusion fails")
    return D


def lemma3_intermediates(G: GroupTable, H: Subgroup, D1: Subgroup, D2: Subgroup) -> list[Subgroup]:
    """Every subgroup between ``D1 ∩ D2`` and H (H/(D1∩D2) has order p^2)."""
    V = D1 & D2
    return [V] + list(hyperplanes(G, H, V)) + [Subgroup(G, H.mask)]
