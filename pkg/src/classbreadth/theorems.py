"""Recursive normal-subgroup construction with auditable certificates.

:func:`theorem1` executes the inductive construction step by step:

* ``BASE``    -- ``n == 0``; return H.
* ``CENTRAL`` -- ``f(H, m)`` centralizes H; return H.
* ``CASE_A``  -- ``<C1 ∪ C2>`` is proper in H; keep H, replace the first two
  C's by ``P`` and ``<C1 ∪ C2>``.
* ``CASE_B``  -- ``<C1 ∪ C2> = H``; refine C1, C2 to index-p subgroups D1, D2,
  pick an index-p D avoiding P and the other C's, and continue inside D.

Each non-terminal step lowers n by one and raises m by one.  The returned
:class:`TheoremOneCertificate` records every step so it can be replayed by
:func:`audit_certificate`.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EnumerationCapExceeded,
    InternalContradiction,
    InvalidPrime,
    PreconditionViolated,
    TrivialGroup,
)
from .group import (
    DEFAULT_NORMAL_CAP,
    GroupTable,
    Subgroup,
    center,
    centralizer,
    index_log,
    is_normal,
    join,
    normal_subgroups,
    product_of_normals,
    trivial_subgroup,
    whole_group,
)
from .lemmas import lemma1_P, lemma2_refine, lemma4_select
from .series import (
    FFunction,
    breadth_profile,
    breadths,
    cl_f,
    lower_central_ffunction,
    lower_central_series,
    max_breadth_outside,
    nilpotency_class,
)

BASE, CENTRAL, CASE_A, CASE_B = "BASE", "CENTRAL", "CASE_A", "CASE_B"


@dataclass
class StepRecord:
    case: str
    n: int
    m: int
    H: Subgroup
    Cs: list[Subgroup]
    P: Optional[Subgroup] = None
    D1: Optional[Subgroup] = None
    D2: Optional[Subgroup] = None
    D: Optional[Subgroup] = None
    strict_decrease_checked: int = 0


@dataclass
class TheoremOneCertificate:
    n: int
    m: int
    H: Subgroup
    Cs: list[Subgroup]
    steps: list[StepRecord]
    result: Subgroup
    postconditions: dict
    f_name: str = ""

    @property
    def accepted(self) -> bool:
        return all(self.postconditions[k] for k in ("B1", "B2", "B3", "B4"))

    @property
    def cases(self) -> list[str]:
        return [s.case for s in self.steps]


def _outside(H: Subgroup, Cs: Sequence[Subgroup]) -> np.ndarray:
    mask = H.mask.copy()
    for C in Cs:
        mask &= ~C.mask
    return np.flatnonzero(mask)


def _check_inputs(G: GroupTable, H: Subgroup, Cs: Sequence[Subgroup]) -> None:
    p = G.prime
    if p == 2:
        raise PreconditionViolated("p = 2 is not supported")
    if len(Cs) != p - 1:
        raise PreconditionViolated(f"expected exactly p - 1 = {p - 1} subgroups C_i, got {len(Cs)}")
    if not is_normal(G, H):
        raise PreconditionViolated("H is not normal in G")
    for C in Cs:
        if not is_normal(G, C):
            raise PreconditionViolated("some C_i is not normal in G")
        if not (C <= H and C != H):
            raise PreconditionViolated("every C_i must be a proper subgroup of H")


def postconditions(G: GroupTable, f: FFunction, n: int, m: int, H: Subgroup,
                   Cs: Sequence[Subgroup], N: Subgroup) -> dict:
    """Recompute the four output clauses for a candidate N."""
    b1 = N <= H and is_normal(G, Subgroup(G, N.mask))
    idx = index_log(H, N) if N <= H else -1
    clf = cl_f(f, N)
    out = _outside(N, Cs)
    witness = int(out[0]) if out.size else -1
    return {
        "B1": bool(b1),
        "B2": bool(b1 and idx <= n),
        "B3": bool(clf <= n + m),
        "B4": bool(out.size > 0),
        "index_log": int(idx),
        "cl_f": int(clf),
        "witness_element": witness,
    }


def _strict_decrease(G: GroupTable, H: Subgroup, P: Subgroup, hi: Subgroup, lo: Subgroup) -> int:
    """Check ``b_lo(x) < b_hi(x)`` for all x in H minus P; returns how many x were checked."""
    xs = np.flatnonzero(H.mask & ~P.mask)
    if xs.size and not np.all(breadths(G, xs, lo) < breadths(G, xs, hi)):
        raise InternalContradiction("breadth does not strictly drop outside P")
    return int(xs.size)


def _step(G: GroupTable, f: FFunction, n: int, m: int, H: Subgroup, Cs: list[Subgroup]):
    """One level of the construction; returns (record, next H, next Cs)."""
    if n == 0:
        return StepRecord(BASE, n, m, H, Cs), None, None
    fHm = f(H, m)
    if fHm <= centralizer(G, H):
        return StepRecord(CENTRAL, n, m, H, Cs), None, None
    fHm1 = f(H, m + 1)
    P = lemma1_P(G, H, fHm1, fHm)
    if P == H:
        raise InternalContradiction("P = H although f(H, m) does not centralize H")
    checked = _strict_decrease(G, H, P, fHm, fHm1)
    C1, C2, rest = Cs[0], Cs[1], list(Cs[2:])
    J = join(G, C1, C2)
    if J != H:
        rec = StepRecord(CASE_A, n, m, H, Cs, P=P, strict_decrease_checked=checked)
        return rec, H, [P, J] + rest
    D1 = lemma2_refine(G, C1, H)
    D2 = lemma2_refine(G, C2, H)
    if D1 == D2:
        raise InternalContradiction("D1 = D2 although <C1 ∪ C2> = H")
    D = lemma4_select(G, H, D1, D2, [P] + rest)
    rec = StepRecord(CASE_B, n, m, H, Cs, P=P, D1=D1, D2=D2, D=D, strict_decrease_checked=checked)
    return rec, D, [P & D, D1 & D2] + [C & D for C in rest]


def theorem1(n: int, m: int, G: GroupTable, f: FFunction, H: Subgroup,
             Cs: Sequence[Subgroup]) -> tuple[Subgroup, TheoremOneCertificate]:
    """Normal ``N ⊆ H`` with ``log_p|H:N| <= n``, ``cl_f(N) <= n + m``, ``N ⊄ ∪ C_i``.

    Hypothesis: ``max b_{f(H,m)}(g) <= n`` over ``g in H \\ ∪ C_i``.  It is
    verified at the root (``PreconditionViolated``) and again at every
    recursion level (``InternalContradiction``).
    """
    if n < 0 or m < 1:
        raise PreconditionViolated("need n >= 0 and m >= 1")
    Cs = list(Cs)
    _check_inputs(G, H, Cs)
    steps: list[StepRecord] = []
    cur_n, cur_m, cur_H, cur_Cs = n, m, H, Cs
    while True:
        top = max_breadth_outside(G, cur_H, cur_Cs, f(cur_H, cur_m))
        if top is None or top > cur_n:
            msg = f"hypothesis fails: interior breadth {top} exceeds n = {cur_n}"
            if not steps:
                raise PreconditionViolated(msg)
            raise InternalContradiction(msg)
        rec, nxt_H, nxt_Cs = _step(G, f, cur_n, cur_m, cur_H, cur_Cs)
        steps.append(rec)
        if nxt_H is None:
            break
        if len(steps) > n + 1:
            raise InternalContradiction("recursion deeper than n + 1")
        cur_n, cur_m, cur_H, cur_Cs = cur_n - 1, cur_m + 1, nxt_H, nxt_Cs
    N = cur_H
    post = postconditions(G, f, n, m, H, Cs, N)
    cert = TheoremOneCertificate(n, m, H, Cs, steps, N, post, f.name)
    if not cert.accepted:
        failed = [k for k in ("B1", "B2", "B3", "B4") if not post[k]]
        raise InternalContradiction(f"postconditions fail: {failed}")
    return N, cert


def audit_certificate(G: GroupTable, f: FFunction, cert: TheoremOneCertificate) -> list[str]:
    """Replay every step from its recorded inputs; return a list of discrepancies."""
    problems = []
    steps = cert.steps
    if not steps:
        return ["certificate has no steps"]
    first = steps[0]
    if (first.n, first.m, first.H, first.Cs) != (cert.n, cert.m, cert.H, cert.Cs):
        problems.append("first step does not echo the input")
    for k, rec in enumerate(steps):
        try:
            again, nxt_H, nxt_Cs = _step(G, f, rec.n, rec.m, rec.H, list(rec.Cs))
        except Exception as exc:  # replay must never raise
            problems.append(f"step {k}: replay raised {exc!r}")
            break
        if again.case != rec.case:
            problems.append(f"step {k}: case {again.case} != recorded {rec.case}")
        for name in ("P", "D1", "D2", "D"):
            if getattr(again, name) != getattr(rec, name):
                problems.append(f"step {k}: {name} differs on replay")
        last = k == len(steps) - 1
        if last:
            if nxt_H is not None:
                problems.append("last step is not terminal")
            elif rec.H != cert.result:
                problems.append("result is not the terminal H")
        else:
            nx = steps[k + 1]
            if nxt_H != nx.H or nxt_Cs != nx.Cs:
                problems.append(f"step {k}: next subgroups differ on replay")
            if (nx.n, nx.m) != (rec.n - 1, rec.m + 1):
                problems.append(f"step {k}: (n, m) not advanced by (-1, +1)")
    if len(steps) > cert.n + 1:
        problems.append("recursion deeper than n + 1")
    post = postconditions(G, f, cert.n, cert.m, cert.H, cert.Cs, cert.result)
    if post != cert.postconditions:
        problems.append("postconditions differ on recomputation")
    if not all(post[k] for k in ("B1", "B2", "B3", "B4")):
        problems.append("postconditions not all true")
    return problems


def theorem2(G: GroupTable) -> tuple[Subgroup, TheoremOneCertificate]:
    """Normal N with ``log_p|G:N| <= b(G)`` and ``cl(N) <= b(G) + 1``."""
    if G.prime == 2:
        raise InvalidPrime("p = 2 is not supported")
    if G.order == 1:
        raise TrivialGroup("theorem2 needs a nontrivial group")
    b = breadth_profile(G).max
    f = lower_central_ffunction(G)
    Gs = whole_group(G)
    N, cert = theorem1(b, 1, G, f, Gs, [trivial_subgroup(G)] * (G.prime - 1))
    if index_log(Gs, N) > b or nilpotency_class(G, N) > b + 1:
        raise InternalContradiction("theorem2 bounds fail on recomputation")
    return N, cert


@dataclass
class Theorem3Result:
    N: Subgroup
    l: int
    maxima: list[int]
    chain: list[Subgroup]
    certificates: list[TheoremOneCertificate]
    index_log: int
    cl: int
    interior_max: int


def theorem3(G: GroupTable, Cs: Sequence[Subgroup], n: int) -> Theorem3Result:
    """Iterate the construction from ``N_0 = G`` until the interior breadth stabilizes."""
    Cs = list(Cs)
    Gs = whole_group(G)
    _check_inputs(G, Gs, Cs)
    top = max_breadth_outside(G, Gs, Cs, Gs)
    if top is None or top > n:
        raise PreconditionViolated(f"interior breadth {top} exceeds n = {n}")
    f = lower_central_ffunction(G)
    chain = [Gs]
    maxima = [top]
    certs = []
    k = 0
    while True:
        Nk = chain[k]
        nxt, cert = theorem1(maxima[k], 1, G, f, Nk, [C & Nk for C in Cs])
        certs.append(cert)
        chain.append(nxt)
        mx = max_breadth_outside(G, nxt, Cs, nxt)
        if mx is None:
            raise InternalContradiction("N_{k+1} is covered by the C_i")
        maxima.append(mx)
        if mx > maxima[k]:
            raise InternalContradiction("interior breadth increased along the chain")
        if mx == maxima[k]:
            break
        k += 1
        if k > n + 1:
            raise InternalContradiction("no fixpoint within n + 2 steps")
    l = k
    N = chain[l + 1]
    idx = index_log(Gs, N)
    cl = nilpotency_class(G, N)
    inner = maxima[l + 1]
    if not (l <= n + 1 and idx <= n * (n + 2) and _outside(N, Cs).size > 0 and cl <= 1 + inner):
        raise InternalContradiction("theorem 3 conclusions fail")
    return Theorem3Result(N, l, maxima, chain, certs, idx, cl, inner)


def _normals_or_sample(G: GroupTable, cap: int) -> tuple[list[Subgroup], bool]:
    try:
        return normal_subgroups(G, cap), False
    except EnumerationCapExceeded as exc:
        return exc.partial, True


@dataclass
class CoveringReport:
    family: list[tuple[Subgroup, Subgroup]]  # (C, N_C)
    breadth: int
    sampled: bool
    product_is_G: bool
    intersection: Subgroup
    intersection_central: bool
    bounds_ok: bool

    @property
    def passed(self) -> bool:
        return self.bounds_ok and self.intersection_central and (self.product_is_G or self.sampled)


def prop1_covering(G: GroupTable, f: FFunction, cap: int = DEFAULT_NORMAL_CAP) -> CoveringReport:
    """Build ``N_C`` for each proper normal C and check the covering mechanism."""
    if G.order == 1:
        raise PreconditionViolated("prop1_covering needs a nontrivial group")
    p = G.prime
    b = breadth_profile(G).max
    Gs = whole_group(G)
    triv = trivial_subgroup(G)
    normals, sampled = _normals_or_sample(G, cap)
    family = []
    bounds_ok = True
    for C in normals:
        if C == Gs:
            continue
        NC, _ = theorem1(b, 1, G, f, Gs, [C] + [triv] * (p - 2))
        ok = index_log(Gs, NC) <= b and cl_f(f, NC) <= b + 1 and not NC <= C
        bounds_ok &= ok
        family.append((C, NC))
    Ns = [NC for _, NC in family]
    product = product_of_normals(G, Ns) if Ns else triv
    inter = Gs
    for NC in Ns:
        inter = inter & f(NC, b + 1)
    return CoveringReport(family, b, sampled, product == Gs, inter, inter <= center(G), bounds_ok)


def _qualifying(G: GroupTable, f: FFunction, normals: Sequence[Subgroup], n: int) -> list[Subgroup]:
    Gs = whole_group(G)
    return [N for N in normals if index_log(Gs, N) <= n - 1 and cl_f(f, N) <= n]


def _product_mask(G: GroupTable, Ns: Sequence[Subgroup]) -> Subgroup:
    if not Ns:
        return trivial_subgroup(G)
    return product_of_normals(G, Ns, check_setwise=False)


def cl_restricted(G: GroupTable, f: FFunction, cap: int = DEFAULT_NORMAL_CAP) -> int:
    """Least n such that the normals with index <= p^(n-1) and ``cl_f <= n`` multiply to G.

    Raises :class:`EnumerationCapExceeded` when the normal lattice is too big.
    """
    normals = normal_subgroups(G, cap)
    Gs = whole_group(G)
    for n in range(1, G.exponent_log + 3):
        if _product_mask(G, _qualifying(G, f, normals, n)) == Gs:
            return n
    raise InternalContradiction("no covering family up to log_p|G| + 2")


@dataclass
class KBounds:
    level: int
    qualifying: int
    lower: Subgroup
    exact: Optional[Subgroup]
    lower_central: bool
    exact_central: Optional[bool]


def k_restricted_bounds(G: GroupTable, f: FFunction, subset_cap: int = 15,
                        cap: int = DEFAULT_NORMAL_CAP) -> KBounds:
    """Inner bound and (for small families) exact value of the restricted K subgroup."""
    level = cl_restricted(G, f, cap)
    Gs = whole_group(G)
    Q = _qualifying(G, f, normal_subgroups(G, cap), level)
    lower = Gs
    for N in Q:
        lower = lower & f(N, level)
    Z = center(G)
    exact = None
    if len(Q) <= subset_cap:
        covering: list[int] = []
        exact = trivial_subgroup(G)
        for r in range(1, len(Q) + 1):
            for combo in _combinations(len(Q), r):
                bits = sum(1 << i for i in combo)
                # a superset of a covering family contributes a smaller intersection
                if any(c & bits == c for c in covering):
                    continue
                if _product_mask(G, [Q[i] for i in combo]) != Gs:
                    continue
                covering.append(bits)
                contrib = Gs
                for i in combo:
                    contrib = contrib & f(Q[i], level)
                exact = join(G, exact, contrib)
    return KBounds(level, len(Q), lower, exact, lower <= Z, None if exact is None else exact <= Z)


def _combinations(k: int, r: int):
    return itertools.combinations(range(k), r)


CAVEAT = "restricted evidence; neither a proof nor a refutation of the conjecture over all of F_G"


@dataclass
class ConjectureReport:
    label: str
    cl: int
    cl_restricted: Optional[int]
    k: Optional[KBounds]
    gamma_next: Optional[Subgroup]
    sampled: bool
    f_name: str

    @property
    def conj1_consistent(self) -> Optional[bool]:
        return None if self.cl_restricted is None else self.cl <= self.cl_restricted

    @property
    def conj2_lower(self) -> Optional[bool]:
        if self.k is None:
            return None
        return self.gamma_next <= self.k.lower

    @property
    def conj2_exact(self) -> Optional[bool]:
        if self.k is None or self.k.exact is None:
            return None
        return self.gamma_next <= self.k.exact

    def lines(self) -> list[str]:
        out = [f"group {self.label}, f = {self.f_name}"]
        if self.sampled:
            out.append(f"sampled: normal-subgroup enumeration exceeded the cap; restricted Cl/K not computed [{CAVEAT}]")
            out.append(f"cl(G) = {self.cl} [{CAVEAT}]")
            return out
        out.append(f"cl(G) = {self.cl}, restricted Cl = {self.cl_restricted}, "
                   f"cl <= restricted Cl: {self.conj1_consistent} [{CAVEAT}]")
        k = self.k
        out.append(f"gamma_(Cl+1)(G) order {self.gamma_next.order} inside inner restricted K "
                   f"(order {k.lower.order}): {self.conj2_lower} [{CAVEAT}]")
        if k.exact is None:
            out.append(f"exact restricted K skipped: {k.qualifying} qualifying subgroups exceed subset cap [{CAVEAT}]")
        else:
            out.append(f"gamma_(Cl+1)(G) inside exact restricted K (order {k.exact.order}): "
                       f"{self.conj2_exact} [{CAVEAT}]")
        out.append(f"restricted K central: inner {k.lower_central}, exact {k.exact_central} [{CAVEAT}]")
        return out


def conjecture_report(G: GroupTable, f: FFunction, cap: int = DEFAULT_NORMAL_CAP,
                      subset_cap: int = 15) -> ConjectureReport:
    cl = nilpotency_class(G, whole_group(G))
    try:
        k = k_restricted_bounds(G, f, subset_cap, cap)
    except EnumerationCapExceeded:
        return ConjectureReport(G.label, cl, None, None, None, True, f.name)
    series = lower_central_series(G, whole_group(G))
    gamma = series[k.level] if k.level < len(series) else trivial_subgroup(G)
    return ConjectureReport(G.label, cl, k.level, k, gamma, False, f.name)


@dataclass
class SurveyRow:
    label: str
    p: int
    order: int
    breadth: Optional[int] = None
    cls: Optional[int] = None
    status: Optional[bool] = None
    t2_index: Optional[int] = None
    t2_class: Optional[int] = None
    ms: float = 0.0
    t2_ok: Optional[bool] = None
    error: str = ""

    def as_csv_fields(self) -> list:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            return v
        return [self.label, self.p, self.order, fmt(self.breadth), fmt(self.cls), fmt(self.status),
                fmt(self.t2_index), fmt(self.t2_class), f"{self.ms:.1f}"]


def class_breadth_check(G: GroupTable) -> SurveyRow:
    """Exhaustive cl and b, the status flag ``cl <= b + 1``, and a theorem2 cross-check."""
    if G.prime == 2:
        raise InvalidPrime("p = 2 is not supported")
    t0 = time.perf_counter()
    Gs = whole_group(G)
    b = breadth_profile(G).max
    cl = nilpotency_class(G, Gs)
    row = SurveyRow(G.label, G.prime, G.order, b, cl, cl <= b + 1)
    if G.order > 1:
        N, cert = theorem2(G)
        row.t2_index = index_log(Gs, N)
        row.t2_class = nilpotency_class(G, N)
        row.t2_ok = cert.accepted and row.t2_index <= b and row.t2_class <= b + 1
    else:
        row.t2_index, row.t2_class, row.t2_ok = 0, 0, True
    row.ms = (time.perf_counter() - t0) * 1000
    return row


def random_theorem1_instance(G: GroupTable, normals: Sequence[Subgroup], rng: random.Random,
                             slack: int = 1, f: Optional[FFunction] = None):
    """Random valid (n, m, H, Cs) with Cs drawn from proper normal subgroups of H."""
    f = f or lower_central_ffunction(G)
    candidates = [H for H in normals if not H.is_trivial()]
    H = rng.choice(candidates)
    inside = [C for C in normals if C <= H and C != H]
    Cs = [rng.choice(inside) for _ in range(G.prime - 1)]
    m = rng.randint(1, 2)
    top = max_breadth_outside(G, H, Cs, f(H, m))
    n = top + rng.randint(0, slack)
    return n, m, H, Cs
