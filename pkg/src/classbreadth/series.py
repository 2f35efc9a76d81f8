"""Breadth statistics, lower central series and subgroup-valued level functions."""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ClFDiverged, PreconditionViolated
from .group import (
    GroupTable,
    Subgroup,
    centralizer,
    class_sizes,
    commutator_subgroup,
    ilog,
    index_log,
    is_normal,
)

_CHUNK = 1 << 22


def commuting_counts(G: GroupTable, gs: np.ndarray, K: Subgroup) -> np.ndarray:
    """``|K ∩ Z_G(g)|`` for every g in ``gs``."""
    gs = np.asarray(gs, dtype=np.int64)
    ks = K.members
    cm = commute_matrix(G)
    if cm is not None:
        return cm[gs][:, ks].sum(axis=1)
    out = np.empty(gs.size, dtype=np.int64)
    step = max(1, _CHUNK // max(1, ks.size))
    for s in range(0, gs.size, step):
        g = gs[s:s + step, None]
        out[s:s + step] = (G.mul(g, ks[None, :]) == G.mul(ks[None, :], g)).sum(axis=1)
    return out


def commute_matrix(G: GroupTable):
    """Boolean ``x y == y x`` matrix, cached for groups that carry a Cayley table."""
    if not G.has_table:
        return None
    return G.cached("commute", lambda: G.mul(G.all[:, None], G.all[None, :]) == G.mul(G.all[None, :], G.all[:, None]))


def breadths(G: GroupTable, gs, K: Subgroup) -> np.ndarray:
    """Relative breadths ``b_K(g) = log_p |K : K ∩ Z_G(g)|`` as an int array."""
    counts = commuting_counts(G, gs, K)
    vals, inverse = np.unique(counts, return_inverse=True)
    logs = np.asarray([ilog(G.prime, K.order // int(c)) for c in vals], dtype=np.int64)
    return logs[inverse.reshape(-1)]


def breadth_rel(G: GroupTable, g: int, H: Subgroup) -> int:
    return index_log(H, H & centralizer(G, g))


@dataclass
class BreadthProfile:
    group: GroupTable
    per_element: np.ndarray
    max: int


def breadth_profile(G: GroupTable) -> BreadthProfile:
    """Breadth of every element from conjugacy class sizes (``|G : Z_G(x)| = |x^G|``)."""
    def make():
        sizes = class_sizes(G)
        table = {int(s): ilog(G.prime, int(s)) for s in np.unique(sizes)}
        per = np.asarray([table[int(s)] for s in sizes], dtype=np.int64)
        return BreadthProfile(G, per, int(per.max()))
    return G.cached("breadth_profile", make)


def max_breadth_outside(G: GroupTable, H: Subgroup, Cs: Sequence[Subgroup], K: Subgroup) -> Optional[int]:
    """``max b_K(g)`` over ``g in H minus the union of Cs``; None when that set is empty."""
    outside = H.mask.copy()
    for C in Cs:
        outside &= ~C.mask
    gs = np.flatnonzero(outside)
    if gs.size == 0:
        return None
    return int(breadths(G, gs, K).max())


def lower_central_series(G: GroupTable, H: Subgroup) -> list[Subgroup]:
    """``[γ_1(H), γ_2(H), ...]`` ending at the first repeated or trivial term."""
    def make():
        series = [H]
        while not series[-1].is_trivial():
            nxt = commutator_subgroup(G, series[-1], H)
            if nxt == series[-1]:
                break
            series.append(nxt)
        return series
    return G.cached(("lcs", H.key), make)


def nilpotency_class(G: GroupTable, H: Subgroup) -> int:
    series = lower_central_series(G, H)
    if not series[-1].is_trivial():
        raise PreconditionViolated("subgroup is not nilpotent")
    return len(series) - 1


class FFunction:
    """Memoized map ``(normal subgroup, level >= 1) -> normal subgroup``.

    Memo keys are member bit sets, so equal subgroups built along different
    paths share entries.
    """

    def __init__(self, group: GroupTable, fn: Callable[[Subgroup, int], Subgroup], name: str = "f"):
        self.group = group
        self.name = name
        self._fn = fn
        self._memo: dict = {}
        self._lock = threading.Lock()

    def __call__(self, N: Subgroup, i: int) -> Subgroup:
        if i < 1:
            raise ValueError("levels start at 1")
        key = (N.key, i)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        val = self._fn(N, i)
        with self._lock:
            return self._memo.setdefault(key, val)

    def __repr__(self):
        return f"FFunction({self.name!r})"


def lower_central_ffunction(G: GroupTable) -> FFunction:
    def gamma(N: Subgroup, i: int) -> Subgroup:
        series = lower_central_series(G, N)
        return series[i - 1] if i <= len(series) else series[-1]
    return FFunction(G, gamma, "lower-central")


@dataclass
class MembershipReport:
    passed: bool
    pairs_checked: int
    subgroups: int
    depth: int
    sampled: bool = False
    violation: Optional[tuple] = None

    def __str__(self):
        status = "pass" if self.passed else f"FAIL {self.violation[0]}"
        extra = " (sampled pairs)" if self.sampled else ""
        return f"F_G membership: {status}; {self.subgroups} subgroups, {self.pairs_checked} pairs, depth {self.depth}{extra}"


def check_F_membership(f: FFunction, normals: Sequence[Subgroup], depth: int,
                       pair_cap: int = 20000, seed: int = 0) -> MembershipReport:
    """Check both defining conditions of F_G on a finite sample.

    Condition 1 (monotone in the subgroup, antitone in the level) is tested on
    every included pair ``N ⊆ M`` with ``1 <= j <= i <= depth``; when there are
    more than ``pair_cap`` pairs a seeded random subset is used.  Condition 2
    (strict change of ``[N, f(N, i)]`` off the centralizer) is tested for
    ``i < depth``.
    """
    if depth < 1:
        raise PreconditionViolated("depth must be at least 1")
    G = f.group
    for N in normals:
        if not is_normal(G, N):
            raise PreconditionViolated("sample contains a subgroup that is not normal")
    pairs = [(a, b) for a, N in enumerate(normals) for b, M in enumerate(normals) if N <= M]
    sampled = len(pairs) > pair_cap
    if sampled:
        pairs = random.Random(seed).sample(pairs, pair_cap)
    for a, b in pairs:
        N, M = normals[a], normals[b]
        for i in range(1, depth + 1):
            fNi = f(N, i)
            for j in range(1, i + 1):
                if not fNi <= f(M, j):
                    return MembershipReport(False, len(pairs), len(normals), depth, sampled,
                                            ("condition 1", a, b, i, j))
    for a, N in enumerate(normals):
        ZN = centralizer(G, N)
        for i in range(1, depth):
            fNi = f(N, i)
            if fNi <= ZN:
                continue
            if commutator_subgroup(G, N, fNi) == commutator_subgroup(G, N, f(N, i + 1)):
                return MembershipReport(False, len(pairs), len(normals), depth, sampled,
                                        ("condition 2", a, i))
    return MembershipReport(True, len(pairs), len(normals), depth, sampled)


def cl_f(f: FFunction, N: Subgroup) -> int:
    """Least ``n >= 1`` with ``f(N, n) ⊆ Z_G(N)``."""
    G = f.group
    ZN = centralizer(G, N)
    cap = G.exponent_log + 2
    for n in range(1, cap + 1):
        if f(N, n) <= ZN:
            return n
    raise ClFDiverged(f"{f.name}: no level up to {cap} lands in the centralizer")
