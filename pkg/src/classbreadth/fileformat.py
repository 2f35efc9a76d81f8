"""Line-oriented group definition files.

Grammar (one statement per line, ``#`` starts a comment, blank lines ignored)::

    name: <label>                     optional
    p: <prime>
    kind: perm | matrix
    n: <dim>                          matrix only, before any gen line
    gen <name>: (1 2 3)(4 5)          perm: 1-based cycles, () for identity
    gen <name>: 1 1 0; 0 1 0; 0 0 1   matrix: rows separated by ';'

Matrix entries are reduced mod p and must be upper unitriangular.
"""

from __future__ import annotations

import re

from .actions import GroupSpec, Kind, check_prime, check_unitriangular, perm_from_cycles, perm_to_cycles
from .errors import InvalidPrime, NotUnitriangular, ParseError

_KEY = re.compile(r"^(name|p|kind|n)\s*:\s*(.*)$")
_GEN = re.compile(r"^gen\s+([A-Za-z_][\w']*)\s*:\s*(.*)$")
_CYCLE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(body: str, lineno: int) -> list[list[int]]:
    stripped = _CYCLE.sub("", body).strip()
    if stripped:
        raise ParseError(lineno, f"unexpected text outside cycles: {stripped!r}")
    cycles = []
    seen: set[int] = set()
    for inner in _CYCLE.findall(body):
        toks = inner.split()
        pts = []
        for t in toks:
            if not t.isdigit() or int(t) < 1:
                raise ParseError(lineno, f"bad point {t!r}; points are positive integers")
            x = int(t) - 1
            if x in seen:
                raise ParseError(lineno, f"point {t} repeated in cycles")
            seen.add(x)
            pts.append(x)
        if len(pts) > 1:
            cycles.append(pts)
    return cycles


def parse_group_file(text: str) -> GroupSpec:
    p = None
    kind = None
    dim = None
    label = ""
    gens: list[tuple[str, object, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KEY.match(line)
        if m:
            key, val = m.group(1), m.group(2).strip()
            if key == "name":
                label = val
            elif key == "p":
                if not re.fullmatch(r"\d+", val):
                    raise ParseError(lineno, f"p must be an integer, got {val!r}")
                p = int(val)
                try:
                    check_prime(p)
                except InvalidPrime as exc:
                    raise InvalidPrime(f"line {lineno}: {exc}") from None
            elif key == "kind":
                if val not in ("perm", "matrix"):
                    raise ParseError(lineno, f"kind must be perm or matrix, got {val!r}")
                kind = Kind(val)
            else:
                if not re.fullmatch(r"\d+", val) or int(val) < 1:
                    raise ParseError(lineno, f"n must be a positive integer, got {val!r}")
                if gens:
                    raise ParseError(lineno, "n must precede the generators")
                dim = int(val)
            continue
        m = _GEN.match(line)
        if not m:
            raise ParseError(lineno, f"unrecognized line {line!r}")
        if p is None or kind is None:
            raise ParseError(lineno, "p and kind must be declared before generators")
        name, body = m.group(1), m.group(2).strip()
        if any(g[0] == name for g in gens):
            raise ParseError(lineno, f"generator {name!r} defined twice")
        if kind == Kind.PERM:
            gens.append((name, _parse_cycles(body, lineno), lineno))
        else:
            if dim is None:
                raise ParseError(lineno, "matrix groups need 'n: <dim>' before generators")
            rows = [r.split() for r in body.split(";")]
            if len(rows) != dim or any(len(r) != dim for r in rows):
                raise ParseError(lineno, f"expected {dim} rows of {dim} entries")
            try:
                entries = tuple(int(x) % p for r in rows for x in r)
            except ValueError:
                raise ParseError(lineno, "matrix entries must be integers") from None
            try:
                check_unitriangular(entries, dim, p, name)
            except NotUnitriangular as exc:
                raise NotUnitriangular(f"line {lineno}: {exc}") from None
            gens.append((name, entries, lineno))
    if p is None:
        raise ParseError(0, "missing 'p:' line")
    if kind is None:
        raise ParseError(0, "missing 'kind:' line")
    names = [g[0] for g in gens]
    if kind == Kind.PERM:
        degree = max([x + 1 for _, cyc, _ in gens for c in cyc for x in c], default=1)
        images = [perm_from_cycles(cyc, degree) for _, cyc, _ in gens]
        return GroupSpec(p, kind, images, names, degree=degree, label=label or "group")
    return GroupSpec(p, kind, [g[1] for g in gens], names, dim=dim or 1, label=label or "group")


def format_group_file(spec: GroupSpec) -> str:
    """Serialize a spec back into the file format."""
    lines = []
    if spec.label:
        lines.append(f"name: {spec.label}")
    lines.append(f"p: {spec.prime}")
    lines.append(f"kind: {spec.kind.value}")
    if spec.kind == Kind.MATRIX:
        lines.append(f"n: {spec.dim}")
    for name, g in zip(spec.names, spec.generators):
        if spec.kind == Kind.PERM:
            cyc = perm_to_cycles(g)
            body = "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cyc) or "()"
        else:
            d = spec.dim
            body = "; ".join(" ".join(str(v) for v in g[r * d:(r + 1) * d]) for r in range(d))
        lines.append(f"gen {name}: {body}")
    return "\n".join(lines) + "\n"
