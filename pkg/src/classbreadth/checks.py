"""Named verification checks shared by the CLI and the acceptance suite."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import CBCError, EnumerationCapExceeded
from .group import (
    DEFAULT_NORMAL_CAP,
    GroupTable,
    Subgroup,
    normal_subgroups,
    trivial_subgroup,
)
from .lemmas import lemma1_P, lemma2_refine, lemma3_intermediates, lemma4_select
from .series import breadth_profile, lower_central_ffunction
from .theorems import (
    audit_certificate,
    class_breadth_check,
    cl_restricted,
    prop1_covering,
    theorem2,
    theorem3,
)

CHECK_NAMES = ("class-breadth", "theorem2", "theorem3", "lemmas", "prop1")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    certificates: list = field(default_factory=list)


def normals_or_sample(G: GroupTable, cap: int) -> tuple[list[Subgroup], bool]:
    try:
        return normal_subgroups(G, cap), False
    except EnumerationCapExceeded as exc:
        return exc.partial, True


def check_class_breadth(G: GroupTable, **_) -> CheckResult:
    row = class_breadth_check(G)
    ok = bool(row.status and row.t2_ok)
    detail = f"cl {row.cls}, b {row.breadth}, cl <= b+1: {row.status}; theorem2 index {row.t2_index}, cl(N) {row.t2_class}"
    return CheckResult("class-breadth", ok, detail)


def check_theorem2(G: GroupTable, **_) -> CheckResult:
    N, cert = theorem2(G)
    problems = audit_certificate(G, lower_central_ffunction(G), cert)
    b = breadth_profile(G).max
    detail = (f"N order {N.order}, index_log {cert.postconditions['index_log']} <= b {b}, "
              f"cl_f {cert.postconditions['cl_f']}, steps {'/'.join(cert.cases)}")
    if problems:
        detail += "; audit: " + "; ".join(problems)
    return CheckResult("theorem2", not problems and cert.accepted, detail, [cert])


def check_theorem3(G: GroupTable, **_) -> CheckResult:
    n = breadth_profile(G).max
    res = theorem3(G, [trivial_subgroup(G)] * (G.prime - 1), n)
    detail = (f"fixpoint l = {res.l} <= {n + 1}, index_log {res.index_log} <= {n * (n + 2)}, "
              f"cl(N) {res.cl} <= 1 + {res.interior_max}")
    return CheckResult("theorem3", True, detail, res.certificates)


def run_lemma_suite(G: GroupTable, normals: Sequence[Subgroup], rng: random.Random,
                    samples: int) -> dict:
    """Random valid inputs for the three constructions; counts of calls made.

    Each construction re-verifies its own conclusions and raises on failure.
    """
    counts = {"lemma1": 0, "lemma2": 0, "lemma3": 0, "lemma4": 0}
    pairs = [(A, B) for A in normals for B in normals if A <= B]
    strict = [(A, B) for A, B in pairs if A != B]
    for _ in range(samples):
        if pairs:
            C1, C2 = rng.choice(pairs)
            N = rng.choice(normals)
            lemma1_P(G, N, C1, C2)
            counts["lemma1"] += 1
        if strict:
            C1, C2 = rng.choice(strict)
            lemma2_refine(G, C1, C2)
            counts["lemma2"] += 1
    quads = lemma4_inputs(G, normals)
    for _ in range(samples if quads else 0):
        H, D1, D2, inside = rng.choice(quads)
        k = rng.randint(0, G.prime - 2)
        avoid = [rng.choice(inside) for _ in range(k)] if inside else []
        lemma4_select(G, H, D1, D2, avoid)
        counts["lemma4"] += 1
        for S in lemma3_intermediates(G, H, D1, D2):
            from .group import is_normal
            if not is_normal(G, S):
                raise AssertionError("an intermediate subgroup is not normal")
            counts["lemma3"] += 1
    return counts


def lemma4_inputs(G: GroupTable, normals: Sequence[Subgroup]):
    """(H, D1, D2, proper normals of H) for every H with two index-p normal subgroups."""
    out = []
    for H in normals:
        if H.order < G.prime ** 2:
            continue
        inside = [C for C in normals if C <= H and C != H]
        maxi = [D for D in inside if H.order // D.order == G.prime]
        for i in range(len(maxi)):
            for j in range(i + 1, len(maxi)):
                out.append((H, maxi[i], maxi[j], inside))
    return out


def check_lemmas(G: GroupTable, cap: int = DEFAULT_NORMAL_CAP, samples: int = 40, seed: int = 0, **_) -> CheckResult:
    normals, sampled = normals_or_sample(G, cap)
    counts = run_lemma_suite(G, normals, random.Random(seed), samples)
    detail = ", ".join(f"{k} x{v}" for k, v in counts.items()) + (" (sampled lattice)" if sampled else "")
    return CheckResult("lemmas", True, detail)


def check_prop1(G: GroupTable, cap: int = DEFAULT_NORMAL_CAP, **_) -> CheckResult:
    f = lower_central_ffunction(G)
    rep = prop1_covering(G, f, cap)
    b = rep.breadth
    detail = (f"{len(rep.family)} covering subgroups, product = G: {rep.product_is_G}, "
              f"intersection central: {rep.intersection_central}")
    ok = rep.passed
    if rep.sampled:
        detail += " (sampled: lattice exceeds cap)"
    else:
        clr = cl_restricted(G, f, cap)
        detail += f", restricted Cl {clr} <= b+1 = {b + 1}"
        ok = ok and clr <= b + 1
    return CheckResult("prop1", ok, detail)


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "class-breadth": check_class_breadth,
    "theorem2": check_theorem2,
    "theorem3": check_theorem3,
    "lemmas": check_lemmas,
    "prop1": check_prop1,
}


def run_check(name: str, G: GroupTable, **kw) -> CheckResult:
    try:
        return CHECKS[name](G, **kw)
    except CBCError as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    except AssertionError as exc:
        return CheckResult(name, False, f"AssertionError: {exc}")
