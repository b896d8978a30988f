"""Finite groups on opaque indices: cosets, abelianizations, transfer.

A group is a validated multiplication table; elements are the indices
0..n-1 and carry display names.  Everything downstream (Galois models,
plectic elements, reciprocity data) is built on these indices, so a
units-mod-n group and a hand-supplied table behave identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .abelian import AbHom, FinAb, Vec, hom_from_pairs, smith_normal_form
from .errors import NoIdentity, NonAssociative, NotASubgroup, NotInvertible

DEFAULT_MAX_ORDER = 10_000


class FiniteGroup:
    """Finite group given by a multiplication table on indices 0..n-1."""

    def __init__(self, names: Sequence[str], table: Sequence[Sequence[int]],
                 max_order: int = DEFAULT_MAX_ORDER, _trusted: bool = False):
        n = len(names)
        if n == 0:
            raise NoIdentity("a group needs at least the identity element")
        if n > max_order:
            raise ValueError(f"group of order {n} exceeds the cap of {max_order}")
        if len(set(names)) != n:
            raise ValueError("element names must be distinct")
        self.names: tuple[str, ...] = tuple(str(x) for x in names)
        T = np.asarray(table, dtype=np.int64)
        if T.shape != (n, n) or T.min(initial=0) < 0 or T.max(initial=0) >= n:
            raise ValueError("table must be square with entries in range")
        self.table = T
        self._index: dict[str, int] = {name: i for i, name in enumerate(self.names)}
        if not _trusted:
            self._validate()
        self.identity = self._find_identity()
        self.inverse = self._find_inverses()

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        T = self.table
        n = len(self.names)
        # rows and columns must be permutations, otherwise some element
        # has no inverse on one side
        ref = np.arange(n)
        for i in range(n):
            if not np.array_equal(np.sort(T[i]), ref) or not np.array_equal(np.sort(T[:, i]), ref):
                raise NotInvertible(f"row or column {self.names[i]!r} is not a permutation")
        self._find_identity()
        for a in range(n):
            if not np.array_equal(T[T[a], :], T[a][T]):
                raise NonAssociative(f"associativity fails with left factor {self.names[a]!r}")

    def _find_identity(self) -> int:
        T = self.table
        n = len(self.names)
        ref = np.arange(n)
        for e in range(n):
            if np.array_equal(T[e], ref) and np.array_equal(T[:, e], ref):
                return e
        raise NoIdentity("table has no two-sided identity")

    def _find_inverses(self) -> np.ndarray:
        n = len(self.names)
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.nonzero(self.table[a] == self.identity)[0]
            if len(hits) != 1 or self.table[hits[0], a] != self.identity:
                raise NotInvertible(f"element {self.names[a]!r} has no two-sided inverse")
            inv[a] = hits[0]
        return inv

    # -- basics -------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.names)

    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def prod(self, elems: Sequence[int]) -> int:
        out = self.identity
        for x in elems:
            out = int(self.table[out, x])
        return out

    def power(self, a: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(a), -k)
        out = self.identity
        for _ in range(k):
            out = int(self.table[out, a])
        return out

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
        return n

    def conj(self, g: int, a: int) -> int:
        """g a g^-1."""
        return self.mul(self.mul(g, a), self.inv(g))

    def index_of(self, name: Union[str, int]) -> int:
        key = str(name)
        if key not in self._index:
            raise ValueError(f"unknown element name {key!r}")
        return self._index[key]

    def name_of(self, i: int) -> str:
        return self.names[i]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def closure(self, gens: Sequence[int]) -> frozenset[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def units_group(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """The unit group (Z/nZ)^x under multiplication."""
    if n < 2:
        raise ValueError("units_mod needs n >= 2")
    units = [u for u in range(1, n) if gcd(u, n) == 1]
    pos = {u: i for i, u in enumerate(units)}
    table = [[pos[(a * b) % n] for b in units] for a in units]
    g = FiniteGroup([str(u) for u in units], table, max_order=max_order, _trusted=True)
    # modular multiplication is associative; still find identity/inverses
    return g


def table_group(rows: Sequence[Sequence[Union[str, int]]],
                max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Group from a square array of element names (row label times column label).

    Element order is the first-appearance order in row 0, which must be a
    permutation of all names.
    """
    names: list[str] = []
    seen = set()
    for entry in rows[0]:
        key = str(entry)
        if key not in seen:
            seen.add(key)
            names.append(key)
    pos = {name: i for i, name in enumerate(names)}
    n = len(rows)
    if len(names) != n:
        raise NotInvertible("first table row does not enumerate all elements")
    try:
        table = [[pos[str(entry)] for entry in row] for row in rows]
    except KeyError as exc:
        raise NotInvertible(f"unknown element name {exc.args[0]!r} in table") from None
    return FiniteGroup(names, table, max_order=max_order)


def make_group(presentation: Mapping, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Build a group from a descriptor: {'units_mod': n} or {'table': rows}."""
    keys = set(presentation)
    if keys == {"units_mod"}:
        return units_group(int(presentation["units_mod"]), max_order=max_order)
    if keys == {"table"}:
        return table_group(presentation["table"], max_order=max_order)
    raise ValueError(f"presentation must have exactly one of 'units_mod' or 'table', got {sorted(keys)}")


# ---------------------------------------------------------------------------
# Subgroups and cosets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(int(m) for m in self.members))))
        object.__setattr__(self, "_member_set", frozenset(self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, el: int) -> bool:
        return el in self._member_set

    def member_names(self) -> tuple[str, ...]:
        return tuple(self.parent.name_of(m) for m in self.members)


def subgroup(parent: FiniteGroup, members: Sequence[Union[str, int]]) -> Subgroup:
    """Validated subgroup from element names (ints are coerced to names)."""
    idx = sorted({parent.index_of(m) for m in members})
    mset = set(idx)
    if parent.identity not in mset:
        raise NotASubgroup("subgroup must contain the identity")
    for a in idx:
        if parent.inv(a) not in mset:
            raise NotASubgroup(f"not closed under inverse at {parent.name_of(a)!r}")
        for b in idx:
            if parent.mul(a, b) not in mset:
                raise NotASubgroup(
                    f"not closed under product at {parent.name_of(a)!r} * {parent.name_of(b)!r}")
    return Subgroup(parent, tuple(idx))


def is_subgroup_of(inner: Subgroup, outer: Subgroup) -> bool:
    return inner.parent is outer.parent and set(inner.members) <= set(outer.members)


@dataclass(frozen=True)
class CosetSpace:
    """Left cosets gH, canonically ordered by least member index."""

    parent: FiniteGroup
    subgroup: Subgroup
    cosets: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.cosets)

    def __post_init__(self):
        lookup = {}
        for ci, coset in enumerate(self.cosets):
            for el in coset:
                lookup[el] = ci
        object.__setattr__(self, "_coset_of", lookup)

    def coset_of(self, el: int) -> int:
        return self._coset_of[el]

    def least_section(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.cosets)

    def coset_names(self, ci: int) -> tuple[str, ...]:
        return tuple(self.parent.name_of(e) for e in self.cosets[ci])


def left_cosets(G: FiniteGroup, H: Subgroup) -> CosetSpace:
    if H.parent is not G:
        raise NotASubgroup("subgroup belongs to a different group")
    remaining = set(G.elements())
    cosets = []
    while remaining:
        g = min(remaining)
        coset = tuple(sorted(G.mul(g, h) for h in H.members))
        cosets.append(coset)
        remaining -= set(coset)
    cosets.sort(key=lambda c: c[0])
    return CosetSpace(G, H, tuple(cosets))


# ---------------------------------------------------------------------------
# Abelianization
# ---------------------------------------------------------------------------

def commutator_subgroup(H: Subgroup) -> frozenset[int]:
    G = H.parent
    comms = {
        G.prod([a, b, G.inv(a), G.inv(b)])
        for a in H.members
        for b in H.members
    }
    # closure inside H
    seen = {G.identity}
    frontier = [G.identity]
    gens = sorted(comms)
    while frontier:
        nxt = []
        for x in frontier:
            for c in gens:
                y = G.mul(x, c)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


@dataclass(frozen=True)
class AbelianQuotient:
    """Abelianization of a subgroup, in invariant-factor form.

    group is the abstract finite abelian group; project sends a member of
    the source to its class; reps picks one source element per standard
    generator.
    """

    source: Subgroup
    group: FinAb
    reps: tuple[int, ...]
    _table: Mapping[int, Vec]

    def project(self, el: int) -> Vec:
        try:
            return self._table[el]
        except KeyError:
            raise ValueError(f"element {el} is not in the source subgroup") from None


def abelianization(H: Subgroup) -> AbelianQuotient:
    """Quotient of H by its commutator subgroup, as invariant factors."""
    G = H.parent
    comm = commutator_subgroup(H)
    # classes of the quotient Q = H/[H,H]
    class_of: dict[int, int] = {}
    classes: list[int] = []  # least representative per class
    for h in H.members:
        if h in class_of:
            continue
        coset = sorted(G.mul(h, c) for c in comm)
        ci = len(classes)
        classes.append(coset[0])
        for el in coset:
            class_of[el] = ci
    k = len(classes)

    def qmul(i: int, j: int) -> int:
        return class_of[G.mul(classes[i], classes[j])]

    qid = class_of[G.identity]
    # greedy generating set of Q
    gens: list[int] = []
    spanned = {qid}
    for ci in range(k):
        if ci in spanned:
            continue
        gens.append(ci)
        spanned = {qid}
        frontier = [qid]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = qmul(x, g)
                    if y not in spanned:
                        spanned.add(y)
                        nxt.append(y)
            frontier = nxt
    m = len(gens)
    if m == 0:
        table = {h: () for h in H.members}
        return AbelianQuotient(H, FinAb(()), (), table)

    # exponent vectors: one preimage vector in Z^m per class (BFS)
    vec_of: dict[int, tuple[int, ...]] = {qid: (0,) * m}
    frontier = [qid]
    while frontier:
        nxt = []
        for x in frontier:
            for gi, g in enumerate(gens):
                y = qmul(x, g)
                if y not in vec_of:
                    v = list(vec_of[x])
                    v[gi] += 1
                    vec_of[y] = tuple(v)
                    nxt.append(y)
        frontier = nxt

    # relation lattice: order relations plus closure defects
    relations: list[list[int]] = []
    for gi, g in enumerate(gens):
        o, y = 1, g
        while y != qid:
            y = qmul(y, g)
            o += 1
        relations.append([o if i == gi else 0 for i in range(m)])
    for x in range(k):
        for gi, g in enumerate(gens):
            y = qmul(x, g)
            rel = [vec_of[x][i] - vec_of[y][i] for i in range(m)]
            rel[gi] += 1
            if any(rel):
                relations.append(rel)
    L = [[rel[i] for rel in relations] for i in range(m)]
    U, D, _ = smith_normal_form(L)
    keep = [i for i in range(m) if D[i][i] != 1]
    fin = FinAb(tuple(D[i][i] for i in keep))

    def to_coords(vec: Sequence[int]) -> Vec:
        full = [sum(U[i][j] * vec[j] for j in range(m)) for i in range(m)]
        return fin.reduce([full[i] for i in keep])

    table = {}
    for h in H.members:
        table[h] = to_coords(vec_of[class_of[h]])
    reps = []
    for gi in range(fin.rank):
        target = tuple(1 if i == gi else 0 for i in range(fin.rank))
        rep = min(h for h in H.members if table[h] == target)
        reps.append(rep)
    return AbelianQuotient(H, fin, tuple(reps), table)


# ---------------------------------------------------------------------------
# Transfer (Verlagerung)
# ---------------------------------------------------------------------------

def transfer(
    G: FiniteGroup,
    H: Subgroup,
    gamma: int,
    ab: Optional[AbelianQuotient] = None,
    cosets: Optional[CosetSpace] = None,
    section: Optional[Sequence[int]] = None,
) -> Vec:
    """Classical transfer of gamma into the abelianization of H.

    With coset representatives s_x, multiplies the factors
    s_{gamma.x}^-1 gamma s_x over all cosets x and projects to H^ab;
    the result does not depend on the section.
    """
    if H.parent is not G:
        raise NotASubgroup("subgroup belongs to a different group")
    if cosets is None:
        cosets = left_cosets(G, H)
    if ab is None:
        ab = abelianization(H)
    s = tuple(section) if section is not None else cosets.least_section()
    out = ab.group.zero()
    for x in range(cosets.index):
        gx = cosets.coset_of(G.mul(gamma, s[x]))
        factor = G.prod([G.inv(s[gx]), gamma, s[x]])
        if factor not in H:
            raise NotASubgroup("transfer factor escaped the subgroup; bad section")
        out = ab.group.add(out, ab.project(factor))
    return out


def transfer_between(
    big: Subgroup,
    small: Subgroup,
    gamma: int,
    ab: AbelianQuotient,
    section: Optional[Sequence[int]] = None,
) -> Vec:
    """Transfer of an element of a subgroup into the abelianization of a
    finite-index subgroup of it (cosets taken inside the bigger subgroup)."""
    G = big.parent
    if small.parent is not G or not is_subgroup_of(small, big):
        raise NotASubgroup("transfer needs nested subgroups of one group")
    if gamma not in big:
        raise NotASubgroup("transferred element must lie in the bigger subgroup")
    # left cosets of small inside big, ordered by least member
    remaining = set(big.members)
    cosets = []
    while remaining:
        g = min(remaining)
        coset = tuple(sorted(G.mul(g, h) for h in small.members))
        cosets.append(coset)
        remaining -= set(coset)
    cosets.sort(key=lambda c: c[0])
    coset_of = {el: ci for ci, coset in enumerate(cosets) for el in coset}
    s = tuple(section) if section is not None else tuple(c[0] for c in cosets)
    out = ab.group.zero()
    for x in range(len(cosets)):
        gx = coset_of[G.mul(gamma, s[x])]
        factor = G.prod([G.inv(s[gx]), gamma, s[x]])
        if factor not in small:
            raise NotASubgroup("transfer factor escaped the subgroup; bad section")
        out = ab.group.add(out, ab.project(factor))
    return out


def transfer_hom(
    G: FiniteGroup,
    H: Subgroup,
    source_ab: AbelianQuotient,
    target_ab: AbelianQuotient,
) -> AbHom:
    """The transfer as a homomorphism source^ab -> H^ab.

    source_ab must be the abelianization of the subgroup the transferred
    elements live in (typically all of G); consistency over every element
    is checked by the pair solver.
    """
    cosets = left_cosets(G, H)
    pairs = []
    for g in source_ab.source.members:
        pairs.append((source_ab.project(g), transfer(G, H, g, ab=target_ab, cosets=cosets)))
    return hom_from_pairs(source_ab.group, target_ab.group, pairs)


def restriction_hom(inner_ab: AbelianQuotient, outer_ab: AbelianQuotient) -> AbHom:
    """Map of abelianizations induced by a subgroup inclusion."""
    if not set(inner_ab.source.members) <= set(outer_ab.source.members):
        raise NotASubgroup("inner subgroup is not contained in the outer one")
    pairs = [(inner_ab.project(h), outer_ab.project(h)) for h in inner_ab.source.members]
    return hom_from_pairs(inner_ab.group, outer_ab.group, pairs)
