"""Concrete group actions (permutations, unitriangular matrices over F_p).

Elements are stored as flat integer rows so that batches of them can be
composed with numpy and hashed through ``row.tobytes()``.  Permutations act
on the right: ``(a * b)[x] == b[a[x]]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidPrime, NotUnitriangular, PreconditionViolated


class Kind(str, enum.Enum):
    PERM = "perm"
    MATRIX = "matrix"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> None:
    if not is_prime(p):
        raise InvalidPrime(f"{p} is not a prime")
    if p == 2:
        raise InvalidPrime("p = 2 is not supported; results need an odd prime")


@dataclass
class GroupSpec:
    """Generator description of a finite p-group.

    ``generators`` hold permutations as 0-based image tuples (length
    ``degree``) or matrices as row-major tuples of length ``dim * dim``.
    """

    prime: int
    kind: Kind
    generators: list[tuple[int, ...]]
    names: list[str] = field(default_factory=list)
    degree: int = 0
    dim: int = 0
    family: Optional[tuple[str, tuple]] = None
    label: str = ""

    def __post_init__(self):
        if not self.names:
            self.names = [f"g{i + 1}" for i in range(len(self.generators))]
        if not self.label:
            self.label = family_label(self.family) if self.family else "group"

    @property
    def width(self) -> int:
        return self.degree if self.kind == Kind.PERM else self.dim * self.dim

    def identity_row(self) -> np.ndarray:
        if self.kind == Kind.PERM:
            return np.arange(self.degree, dtype=np.int32)
        return np.eye(self.dim, dtype=np.int32).reshape(-1)

    def generator_rows(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, self.width), dtype=np.int32)
        return np.asarray(self.generators, dtype=np.int32).reshape(len(self.generators), self.width)

    def validate(self) -> None:
        check_prime(self.prime)
        if self.kind == Kind.PERM:
            for g, name in zip(self.generators, self.names):
                if len(g) != self.degree or sorted(g) != list(range(self.degree)):
                    raise PreconditionViolated(f"generator {name} is not a permutation of {self.degree} points")
        else:
            for g, name in zip(self.generators, self.names):
                check_unitriangular(g, self.dim, self.prime, name)


def family_label(family) -> str:
    name, params = family
    if name == "direct_product":
        return "(" + " x ".join(family_label(f) for f in params) + ")"
    return f"{name}({','.join(str(x) for x in params)})"


def check_unitriangular(entries: Sequence[int], dim: int, p: int, name: str = "matrix") -> None:
    if len(entries) != dim * dim:
        raise NotUnitriangular(f"{name}: expected {dim * dim} entries, got {len(entries)}")
    for r in range(dim):
        for c in range(dim):
            v = entries[r * dim + c] % p
            if r == c and v != 1:
                raise NotUnitriangular(f"{name}: diagonal entry ({r + 1},{c + 1}) is {v}, not 1")
            if r > c and v != 0:
                raise NotUnitriangular(f"{name}: entry ({r + 1},{c + 1}) below the diagonal is nonzero")


def compose_rows(kind: Kind, a: np.ndarray, b: np.ndarray, dim: int = 0, p: int = 0) -> np.ndarray:
    """Row-wise product ``a[k] * b[k]`` for 2-D batches of element rows."""
    if kind == Kind.PERM:
        return np.take_along_axis(b, a, axis=1)
    k = a.shape[0]
    prod = np.matmul(a.reshape(k, dim, dim), b.reshape(k, dim, dim)) % p
    return prod.reshape(k, dim * dim).astype(np.int32)


def inverse_rows(kind: Kind, a: np.ndarray, dim: int = 0, p: int = 0) -> np.ndarray:
    if kind == Kind.PERM:
        return np.argsort(a, axis=1).astype(np.int32)
    # unitriangular: (I + M)^-1 = I - M + M^2 - ..., M nilpotent of index <= dim
    k = a.shape[0]
    eye = np.broadcast_to(np.eye(dim, dtype=np.int64), (k, dim, dim))
    m = a.reshape(k, dim, dim).astype(np.int64) - eye
    out = eye.copy()
    term = eye.copy()
    for i in range(1, dim):
        term = np.matmul(term, m) % p
        out = (out + (-1) ** i * term) % p
    return out.reshape(k, dim * dim).astype(np.int32)


def perm_from_cycles(cycles: Sequence[Sequence[int]], degree: int) -> tuple[int, ...]:
    """0-based image tuple from 0-based cycles."""
    img = list(range(degree))
    for cyc in cycles:
        for i, x in enumerate(cyc):
            img[x] = cyc[(i + 1) % len(cyc)]
    return tuple(img)


def perm_to_cycles(img: Sequence[int]) -> list[list[int]]:
    """Nontrivial cycles (0-based), each starting at its smallest point."""
    seen = set()
    out = []
    for start in range(len(img)):
        if start in seen or img[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = img[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = img[x]
        out.append(cyc)
    return out


def matrix_to_perm(entries: Sequence[int], dim: int, p: int) -> tuple[int, ...]:
    """Right action of a matrix on row vectors of F_p^dim, vectors numbered base p."""
    mat = np.asarray(entries, dtype=np.int64).reshape(dim, dim)
    n = p**dim
    vecs = np.array(np.unravel_index(np.arange(n), (p,) * dim)).T
    img = (vecs @ mat) % p
    return tuple(int(x) for x in np.ravel_multi_index(img.T, (p,) * dim))


def as_perm_spec(spec: GroupSpec) -> GroupSpec:
    if spec.kind == Kind.PERM:
        return spec
    gens = [matrix_to_perm(g, spec.dim, spec.prime) for g in spec.generators]
    return GroupSpec(spec.prime, Kind.PERM, gens, list(spec.names), degree=spec.prime**spec.dim,
                     family=spec.family, label=spec.label)
