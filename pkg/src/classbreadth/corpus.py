"""Generator descriptions for the standard p-group families used as a test corpus."""

from __future__ import annotations

import random
from typing import Optional

from .actions import GroupSpec, Kind, as_perm_spec, check_prime, perm_from_cycles
from .errors import OrderCapExceeded, PreconditionViolated
from .group import order_cap

FAMILIES = ("heisenberg", "unitriangular", "extraspecial", "wreath_cyclic",
            "elementary_abelian", "direct_product")


def _elementary(i: int, j: int, dim: int) -> tuple[int, ...]:
    m = [1 if r == c else 0 for r in range(dim) for c in range(dim)]
    m[i * dim + j] = 1
    return tuple(m)


def family_order(family) -> int:
    """Closed-form order of a ``(name, params)`` family label."""
    name, params = family
    if name in ("heisenberg", "extraspecial"):
        return params[0] ** 3
    if name == "unitriangular":
        n, p = params
        return p ** (n * (n - 1) // 2)
    if name == "wreath_cyclic":
        return params[0] ** (params[0] + 1)
    if name == "elementary_abelian":
        return params[0] ** params[1]
    if name == "direct_product":
        out = 1
        for sub in params:
            out *= family_order(sub)
        return out
    raise PreconditionViolated(f"unknown family {name!r}")


def spec_order(spec: GroupSpec) -> int:
    return family_order(spec.family)


def _cap_check(spec: GroupSpec, cap: Optional[int]) -> GroupSpec:
    cap = order_cap() if cap is None else cap
    if spec_order(spec) > cap:
        raise OrderCapExceeded(f"{spec.label} has order {spec_order(spec)} > cap {cap}")
    return spec


def heisenberg(p: int, cap: Optional[int] = None) -> GroupSpec:
    return unitriangular(3, p, cap, family=("heisenberg", (p,)))


def unitriangular(n: int, p: int, cap: Optional[int] = None, family=None) -> GroupSpec:
    """Full UT(n, p), generated by the elementary matrices on the superdiagonal."""
    check_prime(p)
    if n < 2:
        raise PreconditionViolated("unitriangular needs n >= 2")
    gens = [_elementary(i, i + 1, n) for i in range(n - 1)]
    names = [f"e{i + 1}{i + 2}" for i in range(n - 1)]
    spec = GroupSpec(p, Kind.MATRIX, gens, names, dim=n, family=family or ("unitriangular", (n, p)))
    return _cap_check(spec, cap)


def extraspecial(p: int, exponent: int, cap: Optional[int] = None) -> GroupSpec:
    """Extraspecial group of order p^3 and the given exponent (p or p^2).

    Exponent p is the Heisenberg group.  Exponent p^2 is realized as the
    affine maps ``x -> (1+p)^k x + c`` on Z/p^2.
    """
    check_prime(p)
    family = ("extraspecial", (p, exponent))
    if exponent == p:
        gens = [_elementary(0, 1, 3), _elementary(1, 2, 3)]
        return _cap_check(GroupSpec(p, Kind.MATRIX, gens, ["a", "b"], dim=3, family=family), cap)
    if exponent != p * p:
        raise PreconditionViolated("extraspecial exponent must be p or p^2")
    q = p * p
    shift = tuple((x + 1) % q for x in range(q))
    scale = tuple(((1 + p) * x) % q for x in range(q))
    return _cap_check(GroupSpec(p, Kind.PERM, [shift, scale], ["a", "b"], degree=q, family=family), cap)


def wreath_cyclic(p: int, cap: Optional[int] = None) -> GroupSpec:
    """Z_p wr Z_p on p^2 points: a p-cycle on the first block and the block rotation."""
    check_prime(p)
    q = p * p
    base = perm_from_cycles([list(range(p))], q)
    top = tuple(((x // p + 1) % p) * p + x % p for x in range(q))
    spec = GroupSpec(p, Kind.PERM, [base, top], ["a", "t"], degree=q, family=("wreath_cyclic", (p,)))
    return _cap_check(spec, cap)


def elementary_abelian(p: int, k: int, cap: Optional[int] = None) -> GroupSpec:
    """(Z_p)^k as k disjoint p-cycles."""
    check_prime(p)
    if k < 1:
        raise PreconditionViolated("elementary_abelian needs k >= 1")
    deg = k * p
    gens = [perm_from_cycles([list(range(i * p, (i + 1) * p))], deg) for i in range(k)]
    spec = GroupSpec(p, Kind.PERM, gens, [f"x{i + 1}" for i in range(k)], degree=deg,
                     family=("elementary_abelian", (p, k)))
    return _cap_check(spec, cap)


def direct_product(a: GroupSpec, b: GroupSpec, cap: Optional[int] = None) -> GroupSpec:
    """Block-diagonal matrices when both factors are matrices, disjoint permutations otherwise."""
    if a.prime != b.prime:
        raise PreconditionViolated("direct product factors must share the prime")
    p = a.prime
    family = ("direct_product", (a.family, b.family))
    names = [f"{n}_1" for n in a.names] + [f"{n}_2" for n in b.names]
    if a.kind == Kind.MATRIX and b.kind == Kind.MATRIX:
        d = a.dim + b.dim

        def embed(g, dim, off):
            m = [1 if r == c else 0 for r in range(d) for c in range(d)]
            for r in range(dim):
                for c in range(dim):
                    m[(r + off) * d + c + off] = g[r * dim + c]
            return tuple(m)
        gens = [embed(g, a.dim, 0) for g in a.generators] + [embed(g, b.dim, a.dim) for g in b.generators]
        spec = GroupSpec(p, Kind.MATRIX, gens, names, dim=d, family=family)
    else:
        pa, pb = as_perm_spec(a), as_perm_spec(b)
        deg = pa.degree + pb.degree
        gens = [tuple(g) + tuple(range(pa.degree, deg)) for g in pa.generators]
        gens += [tuple(range(pa.degree)) + tuple(x + pa.degree for x in g) for g in pb.generators]
        spec = GroupSpec(p, Kind.PERM, gens, names, degree=deg, family=family)
    return _cap_check(spec, cap)


def family(name: str, *params, cap: Optional[int] = None) -> GroupSpec:
    builders = {
        "heisenberg": heisenberg,
        "unitriangular": unitriangular,
        "extraspecial": extraspecial,
        "wreath_cyclic": wreath_cyclic,
        "elementary_abelian": elementary_abelian,
        "direct_product": direct_product,
    }
    if name not in builders:
        raise PreconditionViolated(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    return builders[name](*params, cap=cap)


def family_members(name: str, p: int, max_order: int) -> list[GroupSpec]:
    """Every member of a one-parameter family for prime p with order at most ``max_order``."""
    out = []
    if name == "heisenberg":
        cands = [lambda: heisenberg(p, cap=max_order)]
    elif name == "extraspecial":
        cands = [lambda: extraspecial(p, p, cap=max_order), lambda: extraspecial(p, p * p, cap=max_order)]
    elif name == "wreath_cyclic":
        cands = [lambda: wreath_cyclic(p, cap=max_order)]
    elif name == "unitriangular":
        cands = []
        n = 2
        while p ** (n * (n - 1) // 2) <= max_order:
            cands.append(lambda n=n: unitriangular(n, p, cap=max_order))
            n += 1
    elif name == "elementary_abelian":
        cands = []
        k = 1
        while p ** k <= max_order:
            cands.append(lambda k=k: elementary_abelian(p, k, cap=max_order))
            k += 1
    else:
        raise PreconditionViolated(f"family {name!r} cannot be surveyed by prime")
    for make in cands:
        try:
            out.append(make())
        except OrderCapExceeded:
            continue
    return out


def _factor_pool(p: int) -> list[GroupSpec]:
    pool = [elementary_abelian(p, 1), elementary_abelian(p, 2), heisenberg(p), extraspecial(p, p * p)]
    if p == 3:
        pool += [wreath_cyclic(3), unitriangular(4, 3)]
    return pool


def random_direct_products(p: int, count: int, max_order: int, seed: int = 0) -> list[GroupSpec]:
    """``count`` distinct seeded random direct products of two or three small factors."""
    rng = random.Random(seed * 1000 + p)
    pool = _factor_pool(p)
    seen: set[str] = set()
    out: list[GroupSpec] = []
    attempts = 0
    while len(out) < count and attempts < 10_000:
        attempts += 1
        k = rng.choice((2, 2, 3))
        picks = [rng.choice(pool) for _ in range(k)]
        order = 1
        for s in picks:
            order *= spec_order(s)
        if order > max_order:
            continue
        spec = picks[0]
        for s in picks[1:]:
            spec = direct_product(spec, s, cap=max_order)
        if spec.label in seen:
            continue
        seen.add(spec.label)
        out.append(spec)
    return out


def standard_corpus(n_random: int = 20, seed: int = 0) -> list[GroupSpec]:
    """Named groups for p in {3, 5} plus seeded random direct products.

    Orders stay at most 3^7 for p = 3 and 5^5 for p = 5.
    """
    bound = {3: 3**7, 5: 5**5}
    named = [
        heisenberg(3), heisenberg(5),
        extraspecial(3, 3), extraspecial(3, 9), extraspecial(5, 5), extraspecial(5, 25),
        wreath_cyclic(3),
        unitriangular(3, 3), unitriangular(4, 3), unitriangular(3, 5),
    ]
    named += [elementary_abelian(3, k) for k in range(1, 7)]
    named += [elementary_abelian(5, k) for k in range(1, 5)]
    per_p = {3: n_random - n_random // 2, 5: n_random // 2}
    randoms = []
    for p in (3, 5):
        randoms += random_direct_products(p, per_p[p], bound[p], seed)
    return named + randoms
