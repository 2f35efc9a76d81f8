"""Materialized finite p-groups and exact subgroup primitives.

Every group is a set of element indices ``0..order-1`` with index 0 the
identity.  Groups of order at most ``TABLE_LIMIT`` carry a full Cayley
table; larger ones multiply by composing their concrete actions and looking
the result up by its byte encoding.  Subgroups are boolean masks over the
element indices.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .actions import GroupSpec, Kind, check_prime, compose_rows, inverse_rows
from .errors import (
    EnumerationCapExceeded,
    InternalContradiction,
    NotAPGroup,
    NotContained,
    NotNormal,
    OrderCapExceeded,
    PreconditionViolated,
)

TABLE_LIMIT = 4096
DEFAULT_ORDER_CAP = 20000
EXHAUSTIVE_CHECK_LIMIT = 2000
RANDOM_TRIPLES = 100_000
DEFAULT_NORMAL_CAP = 1024


def order_cap() -> int:
    return int(os.environ.get("CBC_ORDER_CAP", DEFAULT_ORDER_CAP))


def ilog(p: int, x: int) -> int:
    """Exact base-p logarithm of a power of p."""
    e = 0
    while x > 1 and x % p == 0:
        x //= p
        e += 1
    if x != 1:
        raise ValueError("not a power of p")
    return e


class GroupTable:
    """A finite p-group on element indices ``0..order-1``.

    Build instances with :func:`build_group` or :func:`quotient`; the
    constructor takes already-canonical data.
    """

    def __init__(self, prime: int, inv: np.ndarray, generators: Sequence[int], *,
                 table: Optional[np.ndarray] = None, rows: Optional[np.ndarray] = None,
                 spec: Optional[GroupSpec] = None, label: str = "group"):
        self.prime = prime
        self.order = int(inv.shape[0])
        self.exponent_log = ilog(prime, self.order)
        self.identity = 0
        self.inv = inv
        self.generators = list(generators)
        self.label = label
        self.spec = spec
        self._table = table
        self._rows = rows
        self._lookup: Optional[dict] = None
        self._cache: dict = {}
        if table is None:
            self._lookup = {rows[i].tobytes(): i for i in range(self.order)}

    def __repr__(self):
        return f"GroupTable({self.label!r}, p={self.prime}, order={self.order})"

    @property
    def has_table(self) -> bool:
        return self._table is not None

    @property
    def all(self) -> np.ndarray:
        return np.arange(self.order)

    def mul(self, a, b):
        """Product of element indices; accepts ints or broadcastable arrays."""
        if self._table is not None:
            return self._table[a, b]
        a_arr, b_arr = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        shape = a_arr.shape
        spec = self.spec
        prod = compose_rows(spec.kind, self._rows[a_arr.ravel()], self._rows[b_arr.ravel()],
                            spec.dim, spec.prime)
        out = np.fromiter((self._lookup[r.tobytes()] for r in prod), dtype=np.int64, count=prod.shape[0])
        out = out.reshape(shape)
        return int(out) if out.ndim == 0 else out

    def power(self, x, k: int):
        result = np.zeros_like(np.asarray(x)) if np.ndim(x) else 0
        base = x
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def conj(self, x, g):
        """``g^-1 x g``."""
        return self.mul(self.mul(self.inv[g], x), g)

    def element_repr(self, i: int) -> tuple:
        if self._rows is None:
            return (int(i),)
        return tuple(int(v) for v in self._rows[i])

    def element_str(self, i: int) -> str:
        spec = self.spec
        if spec is None or self._rows is None:
            return f"#{i}"
        row = self._rows[i]
        if spec.kind == Kind.PERM:
            from .actions import perm_to_cycles
            cycles = perm_to_cycles(row)
            return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles) or "()"
        d = spec.dim
        return "; ".join(" ".join(str(int(v)) for v in row[r * d:(r + 1) * d]) for r in range(d))

    def cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]


def build_group(spec: GroupSpec, cap: Optional[int] = None, *, check: bool = True) -> GroupTable:
    """Closure of ``spec``'s generators with breadth-first canonical indexing."""
    spec.validate()
    cap = order_cap() if cap is None else cap
    p = spec.prime
    gens = spec.generator_rows()
    k = gens.shape[0]
    ident = spec.identity_row()
    rows = [ident]
    lookup = {ident.tobytes(): 0}
    right = []  # right[i][j] = index of element_i * gen_j
    parent = [(-1, -1)]
    frontier = [0]
    while frontier:
        block = np.stack([rows[i] for i in frontier])
        a = np.repeat(block, k, axis=0)
        b = np.tile(gens, (len(frontier), 1))
        prods = compose_rows(spec.kind, a, b, spec.dim, p) if k else np.zeros((0, spec.width), np.int32)
        new_frontier = []
        for t, row in enumerate(prods):
            key = row.tobytes()
            idx = lookup.get(key)
            if idx is None:
                idx = len(rows)
                if idx >= cap:
                    raise OrderCapExceeded(f"closure exceeds {cap} elements")
                lookup[key] = idx
                rows.append(row)
                parent.append((frontier[t // k], t % k))
                new_frontier.append(idx)
            right.append(idx)
        frontier = new_frontier
    n = len(rows)
    try:
        ilog(p, n)
    except ValueError:
        raise NotAPGroup(f"closure has order {n}, not a power of {p}") from None
    right_arr = np.asarray(right, dtype=np.int32).reshape(n, k) if k else np.zeros((n, 0), np.int32)
    row_arr = np.stack(rows).astype(np.int32)
    gen_idx = []
    for j in range(k):
        g = int(right_arr[0, j])
        if g != 0 and g not in gen_idx:
            gen_idx.append(g)
    table = None
    if n <= TABLE_LIMIT:
        table = np.empty((n, n), dtype=np.int32)
        table[:, 0] = np.arange(n)
        for j in range(1, n):
            par, g = parent[j]
            table[:, j] = right_arr[table[:, par], g]
        inv = np.empty(n, dtype=np.int32)
        r, c = np.nonzero(table == 0)
        inv[r] = c
    else:
        inv_rows = inverse_rows(spec.kind, row_arr, spec.dim, p)
        inv = np.fromiter((lookup[r.tobytes()] for r in inv_rows), dtype=np.int32, count=n)
    G = GroupTable(p, inv, gen_idx, table=table, rows=row_arr, spec=spec, label=spec.label)
    if check:
        check_group_axioms(G)
    return G


def check_group_axioms(G: GroupTable, seed: int = 0) -> None:
    """Identity, inverse and associativity checks on the multiplication.

    With a full table, associativity uses Light's test over the generators,
    which is equivalent to the exhaustive triple check.  Without a table,
    random triples are sampled.
    """
    n = G.order
    idx = np.arange(n)
    if not (np.array_equal(G.mul(0, idx), idx) and np.array_equal(G.mul(idx, 0), idx)):
        raise InternalContradiction("index 0 is not a two-sided identity")
    if not (np.all(G.mul(idx, G.inv) == 0) and np.all(G.mul(G.inv, idx) == 0)):
        raise InternalContradiction("inverse table is wrong")
    if G.has_table:
        T = G._table
        for g in G.generators:
            if not np.array_equal(T[T[:, g], :], T[:, T[g, :]]):
                raise InternalContradiction(f"associativity fails at generator {g}")
    else:
        rng = np.random.default_rng(seed)
        x, y, z = rng.integers(0, n, size=(3, RANDOM_TRIPLES))
        if not np.array_equal(G.mul(G.mul(x, y), z), G.mul(x, G.mul(y, z))):
            raise InternalContradiction("associativity fails on a random triple")


class Subgroup:
    """Element-index set of a :class:`GroupTable`, immutable once built."""

    __slots__ = ("parent", "mask", "_key", "_members", "_gens", "_normal", "__weakref__")

    def __init__(self, parent: GroupTable, mask: np.ndarray):
        self.parent = parent
        mask = np.asarray(mask, dtype=bool)
        mask.setflags(write=False)
        self.mask = mask
        self._key = None
        self._members = None
        self._gens = None
        self._normal = None

    @classmethod
    def from_elements(cls, G: GroupTable, elements: Iterable[int]) -> "Subgroup":
        mask = np.zeros(G.order, dtype=bool)
        mask[np.fromiter(elements, dtype=np.int64)] = True
        return cls(G, mask)

    @property
    def order(self) -> int:
        return int(self.members.shape[0])

    @property
    def members(self) -> np.ndarray:
        if self._members is None:
            m = np.flatnonzero(self.mask)
            m.setflags(write=False)
            self._members = m
        return self._members

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = np.packbits(self.mask).tobytes()
        return self._key

    @property
    def generators(self) -> list[int]:
        """Greedy generating set: repeatedly add the smallest element not yet covered."""
        if self._gens is None:
            gens: list[int] = []
            cur = np.zeros(self.parent.order, dtype=bool)
            cur[0] = True
            while True:
                rest = np.flatnonzero(self.mask & ~cur)
                if rest.size == 0:
                    break
                x = int(rest[0])
                cur = _closure(self.parent, [x], cur, gens)
                gens.append(x)
            self._gens = gens
        return self._gens

    @property
    def normal(self) -> Optional[bool]:
        return self._normal

    def _set_normal(self, value: bool) -> None:
        if self._normal is None:
            self._normal = value

    def __contains__(self, x) -> bool:
        return bool(self.mask[x])

    def __len__(self) -> int:
        return self.order

    def __le__(self, other: "Subgroup") -> bool:
        return not np.any(self.mask & ~other.mask)

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and self.order < other.order

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.parent is other.parent and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __and__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, self.mask & other.mask)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_whole(self) -> bool:
        return self.order == self.parent.order

    def sort_key(self):
        return (self.order, tuple(int(x) for x in self.members))

    def descriptor(self) -> dict:
        return {"order": self.order, "generator_indices": sorted(self.generators)}

    def __repr__(self):
        return f"Subgroup(order={self.order}, gens={self.generators})"


def _closure(G: GroupTable, gens: Sequence[int], seed_mask: Optional[np.ndarray] = None,
             seed_gens: Sequence[int] = ()) -> np.ndarray:
    """Mask of the subgroup generated by ``gens`` and a seed subgroup.

    ``seed_mask`` must be a subgroup generated by ``seed_gens``.
    """
    if seed_mask is None:
        mask = np.zeros(G.order, dtype=bool)
        mask[0] = True
    else:
        mask = seed_mask.copy()
    new = np.asarray(sorted(set(int(x) for x in gens)), dtype=np.int64)
    if new.size == 0:
        return mask
    allg = np.asarray(sorted(set(int(x) for x in seed_gens) | set(new.tolist())), dtype=np.int64)
    frontier = np.flatnonzero(mask)
    step = new  # the seed is already closed under its own generators
    while frontier.size:
        prods = np.asarray(G.mul(frontier[:, None], step[None, :])).ravel()
        fresh = np.unique(prods[~mask[prods]])
        mask[fresh] = True
        frontier = fresh
        step = allg
    return mask


def trivial_subgroup(G: GroupTable) -> Subgroup:
    def make():
        mask = np.zeros(G.order, dtype=bool)
        mask[0] = True
        s = Subgroup(G, mask)
        s._set_normal(True)
        return s
    return G.cached("trivial", make)


def whole_group(G: GroupTable) -> Subgroup:
    def make():
        s = Subgroup(G, np.ones(G.order, dtype=bool))
        s._set_normal(True)
        s._gens = None
        return s
    return G.cached("whole", make)


def generated_subgroup(G: GroupTable, X: Iterable[int]) -> Subgroup:
    return Subgroup(G, _closure(G, list(X)))


def join(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    """Subgroup generated by ``A ∪ B``."""
    if B <= A:
        return A
    if A <= B:
        return B
    return Subgroup(G, _closure(G, A.generators + B.generators))


def commutator(G: GroupTable, x, y):
    """``x^-1 y^-1 x y``; vectorizes over array arguments."""
    return G.mul(G.mul(G.inv[x], G.inv[y]), G.mul(x, y))


def commutator_set(G: GroupTable, g: int, H: Subgroup) -> frozenset:
    vals = np.asarray(commutator(G, g, H.members))
    return frozenset(int(v) for v in np.unique(vals))


def is_normal(G: GroupTable, H: Subgroup) -> bool:
    if H.normal is not None:
        return H.normal
    ok = True
    members = H.members
    for g in G.generators:
        if not H.mask[G.conj(members, g)].all():
            ok = False
            break
    H._set_normal(ok)
    return ok


def normal_closure(G: GroupTable, X: Iterable[int]) -> Subgroup:
    mask = _closure(G, list(X))
    while True:
        gens = Subgroup(G, mask).generators
        conj = np.asarray([G.conj(np.asarray(gens), g) for g in G.generators]).ravel() if gens and G.generators else np.zeros(0, np.int64)
        outside = np.unique(conj[~mask[conj]]) if conj.size else conj
        if outside.size == 0:
            break
        mask = _closure(G, list(gens) + [int(x) for x in outside])
    K = Subgroup(G, mask)
    K._set_normal(True)
    return K


def commutator_subgroup(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    """``[A, B]``; normal when A and B are both normal in G."""
    if is_normal(G, A) and is_normal(G, B):
        ga = np.asarray(A.generators, dtype=np.int64)
        gb = np.asarray(B.generators, dtype=np.int64)
        if ga.size == 0 or gb.size == 0:
            return trivial_subgroup(G)
        comms = np.asarray(commutator(G, ga[:, None], gb[None, :])).ravel()
        K = normal_closure(G, comms.tolist())
    else:
        comms = np.asarray(commutator(G, A.members[:, None], B.members[None, :])).ravel()
        K = generated_subgroup(G, np.unique(comms).tolist())
    return K


def centralizer(G: GroupTable, target: Union[int, Subgroup]) -> Subgroup:
    """``Z_G(x)`` for an element or ``Z_G(H)`` for a subgroup."""
    idx = G.all
    if isinstance(target, Subgroup):
        mask = np.ones(G.order, dtype=bool)
        for h in target.generators:
            mask &= G.mul(h, idx) == G.mul(idx, h)
    else:
        mask = G.mul(target, idx) == G.mul(idx, target)
    return Subgroup(G, mask)


def center(G: GroupTable) -> Subgroup:
    def make():
        Z = centralizer(G, whole_group(G))
        Z._set_normal(True)
        return Z
    return G.cached("center", make)


def conjugacy_classes(G: GroupTable) -> list[np.ndarray]:
    """Classes as sorted index arrays, ordered by their smallest member."""
    def make():
        seen = np.zeros(G.order, dtype=bool)
        classes = []
        idx = G.all
        for x in range(G.order):
            if seen[x]:
                continue
            cls = np.unique(G.mul(G.mul(G.inv, x), idx))
            seen[cls] = True
            classes.append(cls)
        return classes
    return G.cached("classes", make)


def class_sizes(G: GroupTable) -> np.ndarray:
    def make():
        sizes = np.empty(G.order, dtype=np.int64)
        for cls in conjugacy_classes(G):
            sizes[cls] = cls.size
        return sizes
    return G.cached("class_sizes", make)


def normal_subgroups(G: GroupTable, cap: int = DEFAULT_NORMAL_CAP) -> list[Subgroup]:
    """All normal subgroups, sorted by (order, member list).

    Each normal subgroup is the join of the normal closures of the classes
    it contains, so a breadth-first search that joins one class closure at a
    time from the trivial subgroup reaches all of them.
    """
    if cap < 1:
        raise PreconditionViolated("cap must be at least 1")
    key = ("normals", cap)
    if key in G._cache:
        return G._cache[key]
    closures: dict[bytes, Subgroup] = {}
    for cls in conjugacy_classes(G)[1:]:
        C = generated_subgroup(G, cls.tolist())
        C._set_normal(True)
        closures.setdefault(C.key, C)
    atoms = sorted(closures.values(), key=Subgroup.sort_key)
    triv = trivial_subgroup(G)
    found = {triv.key: triv}
    queue = [triv]
    head = 0
    while head < len(queue):
        N = queue[head]
        head += 1
        for C in atoms:
            if C <= N:
                continue
            M = Subgroup(G, _closure(G, C.generators, N.mask, N.generators))
            if M.key not in found:
                M._set_normal(True)
                found[M.key] = M
                queue.append(M)
                if len(found) > cap:
                    partial = sorted(found.values(), key=Subgroup.sort_key)
                    raise EnumerationCapExceeded(f"more than {cap} normal subgroups", partial)
    out = sorted(found.values(), key=Subgroup.sort_key)
    G._cache[key] = out
    return out


@dataclass(eq=False)
class Projection:
    """Natural map ``source -> source/kernel``."""

    source: GroupTable
    target: GroupTable
    kernel: Subgroup
    map: np.ndarray
    section: np.ndarray


def quotient(G: GroupTable, N: Subgroup) -> Projection:
    if not is_normal(G, N):
        raise NotNormal("quotient by a subgroup that is not normal")
    members = N.members
    first = np.asarray(G.mul(G.all[:, None], members[None, :])).min(axis=1)
    reps_arr, coset = np.unique(first, return_inverse=True)
    coset = coset.reshape(-1).astype(np.int64)
    reps_arr = reps_arr.astype(np.int64)
    m = reps_arr.size
    table = coset[np.asarray(G.mul(reps_arr[:, None], reps_arr[None, :]))].astype(np.int32)
    inv = coset[G.inv[reps_arr]].astype(np.int32)
    tgens = []
    for g in G.generators:
        c = int(coset[g])
        if c != 0 and c not in tgens:
            tgens.append(c)
    target = GroupTable(G.prime, inv, tgens, table=table, rows=reps_arr.reshape(m, 1).astype(np.int32),
                        label=f"{G.label}/N{N.order}")
    return Projection(G, target, N, coset, reps_arr)


def image(pi: Projection, H: Subgroup) -> Subgroup:
    mask = np.zeros(pi.target.order, dtype=bool)
    mask[pi.map[H.members]] = True
    return Subgroup(pi.target, mask)


def preimage(pi: Projection, S: Subgroup) -> Subgroup:
    K = Subgroup(pi.source, S.mask[pi.map])
    if S.normal is not None:
        K._set_normal(S.normal)
    return K


def product_of_normals(G: GroupTable, Ns: Sequence[Subgroup], *, check_setwise: bool = True) -> Subgroup:
    """``N_1 N_2 ... N_k`` for normal subgroups; equals the generated subgroup."""
    for N in Ns:
        if not is_normal(G, N):
            raise NotNormal("product_of_normals needs normal factors")
    gens: list[int] = []
    for N in Ns:
        gens.extend(N.generators)
    P = generated_subgroup(G, gens)
    P._set_normal(True)
    if check_setwise and G.order <= 729:
        s = np.zeros(1, dtype=np.int64)
        for N in Ns:
            s = np.unique(np.asarray(G.mul(s[:, None], N.members[None, :])).ravel())
        if not np.array_equal(s, P.members):
            raise InternalContradiction("setwise product differs from generated subgroup")
    return P


def index_log(K: Subgroup, H: Subgroup) -> int:
    """``log_p |K : H|`` for ``H ⊆ K``."""
    if not H <= K:
        raise NotContained("index_log needs H contained in K")
    return ilog(K.parent.prime, K.order // H.order)


def pth_power_subgroup(G: GroupTable, C: Subgroup) -> Subgroup:
    """``<x^p : x in C>``."""
    powers = np.unique(np.asarray(G.power(C.members, G.prime)))
    return generated_subgroup(G, powers.tolist())


def require_odd_prime(G: GroupTable) -> None:
    check_prime(G.prime)
