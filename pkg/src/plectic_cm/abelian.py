"""Integer linear algebra for finite abelian groups.

Everything here reduces to one engine: Smith normal form over the
integers.  Finite abelian groups are tuples of invariant factors,
elements are reduced integer vectors, homomorphisms are integer matrices
acting on representatives.  Preimages, sections of surjections, fiber
products and subgroup/quotient presentations are all solved through the
same congruence solver, so they agree with each other by construction.

Python ints are used throughout; no floating point, no overflow.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import (
    ConstraintInfeasible,
    NoSolution,
    NotCommuting,
    NotSplit,
    NotSurjective,
)

Vec = tuple[int, ...]
Matrix = tuple[Vec, ...]

# Beyond this many candidates, "all sections" style enumerations refuse
# rather than grind; desk-scale models stay far below it.
ENUMERATION_CAP = 200_000


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(mat: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Diagonalise an integer matrix by unimodular row/column operations.

    Returns (U, D, V) with U @ mat @ V == D, U and V unimodular, and D
    diagonal with nonnegative entries satisfying d1 | d2 | ... (zeros,
    if any, come last).
    """
    A = [[int(x) for x in row] for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A):
        raise ValueError("ragged matrix")
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        for k in range(n):
            A[dst][k] += q * A[src][k]
        for k in range(m):
            U[dst][k] += q * U[src][k]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        # Pivot: entry of least nonzero absolute value in the submatrix.
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])

        while True:
            # Clear column t.
            dirty = False
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(i, t)
                        dirty = True
            if dirty:
                continue
            # Clear row t.
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(j, t)
                        dirty = True
            if dirty:
                continue
            # Divisibility: the pivot must divide every remaining entry.
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)

        if A[t][t] < 0:
            negate_row(t)
        t += 1

    D = [[A[i][j] if i == j else 0 for j in range(n)] for i in range(m)]
    return _freeze(U), _freeze(D), _freeze(V)


def _freeze(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def _mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    if A and B and len(A[0]) != len(B):
        raise ValueError("shape mismatch")
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(row[k] * B[k][j] for k in range(inner)) for j in range(cols)] for row in A]


def _mat_vec(A: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(row[k] * v[k] for k in range(len(v))) for row in A]


def unimodular_inverse(M: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of a unimodular integer matrix (via its own SNF)."""
    U, D, V = smith_normal_form(M)
    n = len(M)
    if any(D[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return _freeze(_mat_mul(V, U))


# ---------------------------------------------------------------------------
# Congruence solver: A x = b  (mod m_i per row), x an integer vector
# ---------------------------------------------------------------------------

def solve_congruence(
    rows: Sequence[Sequence[int]],
    rhs: Sequence[int],
    moduli: Sequence[int],
    n_unknowns: Optional[int] = None,
) -> tuple[list[int], list[list[int]]]:
    """Solve the simultaneous congruences sum_j rows[i][j] x_j = rhs[i] mod moduli[i].

    A modulus of 0 means an exact integer equation.  Returns a particular
    solution and a basis of the lattice of homogeneous solutions.
    Raises NoSolution.  n_unknowns is required when rows is empty.
    """
    m = len(rows)
    n = len(rows[0]) if m else (n_unknowns or 0)
    if n_unknowns is not None and m and len(rows[0]) != n_unknowns:
        raise ValueError("n_unknowns does not match the system")
    if m == 0:
        return [0] * n, [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    slack = [i for i in range(m) if moduli[i] != 0]
    width = n + len(slack)
    B = [[0] * width for _ in range(m)]
    for i in range(m):
        for j in range(n):
            B[i][j] = int(rows[i][j])
    for k, i in enumerate(slack):
        B[i][n + k] = int(moduli[i])

    if width == 0:
        if any(int(x) != 0 for x in rhs):
            raise NoSolution("empty system with nonzero right-hand side")
        return [], []

    U, D, V = smith_normal_form(B)
    c = _mat_vec(U, [int(x) for x in rhs])
    w = [0] * width
    rank = 0
    for i in range(m):
        d = D[i][i] if i < width else 0
        if d != 0:
            if c[i] % d != 0:
                raise NoSolution("congruence system is inconsistent")
            w[i] = c[i] // d
            rank += 1
        elif c[i] != 0:
            raise NoSolution("congruence system is inconsistent")
    z = _mat_vec(V, w)
    kernel = [[V[r][j] for r in range(n)] for j in range(rank, width)]
    return z[:n], kernel


# ---------------------------------------------------------------------------
# Finite abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FinAb:
    """Finite abelian group presented by factors (d_1, ..., d_k), d_i >= 1.

    Elements are length-k integer tuples reduced componentwise.  Canonical
    constructors produce invariant factors d_1 | d_2 | ...; direct sums
    keep the concatenated factors as given.
    """

    factors: tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.factors):
            raise ValueError("factors must be >= 1")

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        out = 1
        for d in self.factors:
            out *= d
        return out

    def zero(self) -> Vec:
        return (0,) * self.rank

    def reduce(self, vec: Sequence[int]) -> Vec:
        if len(vec) != self.rank:
            raise ValueError(f"vector of length {len(vec)} in group of rank {self.rank}")
        return tuple(int(v) % d for v, d in zip(vec, self.factors))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a: Sequence[int]) -> Vec:
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return tuple((x - y) % d for x, y, d in zip(a, b, self.factors))

    def scale(self, k: int, a: Sequence[int]) -> Vec:
        return tuple((k * x) % d for x, d in zip(a, self.factors))

    def elements(self) -> Iterator[Vec]:
        return itertools.product(*(range(d) for d in self.factors))

    def generators(self) -> list[Vec]:
        eye = []
        for i, d in enumerate(self.factors):
            if d > 1:
                eye.append(tuple(1 if j == i else 0 for j in range(self.rank)))
        return eye

    def element_order(self, a: Sequence[int]) -> int:
        from math import gcd
        out = 1
        for x, d in zip(a, self.factors):
            if x % d:
                o = d // gcd(x, d)
                out = out * o // gcd(out, o)
        return out

    def __repr__(self):
        if not self.factors:
            return "FinAb(trivial)"
        return "FinAb(" + " x ".join(f"Z/{d}" for d in self.factors) + ")"


TRIVIAL = FinAb(())


def direct_sum(*groups: FinAb) -> FinAb:
    factors: tuple[int, ...] = ()
    for g in groups:
        factors = factors + g.factors
    return FinAb(factors)


def concat_vec(*parts: Sequence[int]) -> Vec:
    out: tuple[int, ...] = ()
    for p in parts:
        out = out + tuple(int(x) for x in p)
    return out


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbHom:
    """Homomorphism of finite abelian groups as an integer matrix.

    matrix has codomain.rank rows and domain.rank columns and acts on
    representative vectors.  Well-definedness (column j annihilated by
    the j-th domain factor) is validated at construction.
    """

    domain: FinAb
    codomain: FinAb
    matrix: Matrix

    def __post_init__(self):
        rows = self.codomain.rank
        cols = self.domain.rank
        M = self.matrix
        if len(M) != rows or any(len(r) != cols for r in M):
            raise ValueError(f"matrix must be {rows}x{cols}")
        # store entries reduced mod the codomain factor of their row
        reduced = tuple(
            tuple(int(M[i][j]) % self.codomain.factors[i] for j in range(cols))
            for i in range(rows)
        )
        object.__setattr__(self, "matrix", reduced)
        for j in range(cols):
            d = self.domain.factors[j]
            for i in range(rows):
                if (d * reduced[i][j]) % self.codomain.factors[i] != 0:
                    raise ValueError(
                        f"not well defined: column {j} times {d} does not vanish in codomain"
                    )

    def __call__(self, x: Sequence[int]) -> Vec:
        if len(x) != self.domain.rank:
            raise ValueError("element has wrong rank for this homomorphism")
        return self.codomain.reduce(_mat_vec(self.matrix, [int(v) for v in x]))

    def compose(self, other: "AbHom") -> "AbHom":
        """self after other."""
        if other.codomain != self.domain:
            raise ValueError("composition shape mismatch")
        rows, cols, inner = self.codomain.rank, other.domain.rank, self.domain.rank
        M = tuple(
            tuple(sum(self.matrix[i][k] * other.matrix[k][j] for k in range(inner))
                  for j in range(cols))
            for i in range(rows)
        )
        return AbHom(other.domain, self.codomain, M)

    def equals(self, other: "AbHom") -> bool:
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and self.matrix == other.matrix
        )

    def is_surjective(self) -> bool:
        return image_order(self) == self.codomain.order

    def image(self) -> frozenset[Vec]:
        cols = [tuple(self.matrix[i][j] for i in range(self.codomain.rank))
                for j in range(self.domain.rank)]
        return span(self.codomain, cols)

    @staticmethod
    def identity(group: FinAb) -> "AbHom":
        eye = tuple(
            tuple(1 if i == j else 0 for j in range(group.rank)) for i in range(group.rank)
        )
        return AbHom(group, group, eye)

    @staticmethod
    def zero(domain: FinAb, codomain: FinAb) -> "AbHom":
        return AbHom(domain, codomain, tuple((0,) * domain.rank for _ in range(codomain.rank)))

    @staticmethod
    def from_columns(domain: FinAb, codomain: FinAb, cols: Sequence[Sequence[int]]) -> "AbHom":
        """Build a homomorphism from the images of the standard generators."""
        if len(cols) != domain.rank:
            raise ValueError("need one image per domain generator")
        rows = tuple(
            tuple(int(cols[j][i]) for j in range(domain.rank)) for i in range(codomain.rank)
        )
        return AbHom(domain, codomain, rows)


def image_order(f: AbHom) -> int:
    """Order of the image subgroup, via the index of the column lattice."""
    if f.codomain.rank == 0:
        return 1
    rows = [[f.matrix[i][j] for j in range(f.domain.rank)] for i in range(f.codomain.rank)]
    for i, d in enumerate(f.codomain.factors):
        col = [d if r == i else 0 for r in range(f.codomain.rank)]
        for r in range(f.codomain.rank):
            rows[r].append(col[r])
    _, D, _ = smith_normal_form(rows)
    index = 1
    for i in range(f.codomain.rank):
        index *= D[i][i]
    if index == 0:
        raise ValueError("column lattice is not full rank")  # cannot happen: relations included
    return f.codomain.order // index


def span(group: FinAb, gens: Iterable[Sequence[int]]) -> frozenset[Vec]:
    """All elements of the subgroup generated by gens (desk scale: BFS)."""
    seen = {group.zero()}
    frontier = [group.zero()]
    gens = [group.reduce(g) for g in gens]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                cand = group.add(el, g)
                if cand not in seen:
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return frozenset(seen)


# ---------------------------------------------------------------------------
# Preimages
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomSolution:
    """One preimage plus generators of the kernel subgroup."""

    x: Vec
    kernel_gens: tuple[Vec, ...]

    def preimages(self, domain: FinAb) -> frozenset[Vec]:
        return frozenset(domain.add(self.x, k) for k in span(domain, self.kernel_gens))


def solve_hom(f: AbHom, b: Sequence[int]) -> HomSolution:
    """Solve f(x) = b; raises NoSolution if b is not in the image."""
    b = f.codomain.reduce(b)
    x, kernel = solve_congruence(f.matrix, b, f.codomain.factors, n_unknowns=f.domain.rank)
    gens = tuple(sorted({f.domain.reduce(k) for k in kernel} - {f.domain.zero()}))
    return HomSolution(f.domain.reduce(x), gens)


def kernel_gens(f: AbHom) -> tuple[Vec, ...]:
    return solve_hom(f, f.codomain.zero()).kernel_gens


def kernel_elements(f: AbHom) -> frozenset[Vec]:
    return span(f.domain, kernel_gens(f))


# ---------------------------------------------------------------------------
# Subgroup and quotient presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """A finite abelian group re-presented in invariant-factor form.

    group: the abstract group; to_ambient maps it into the original
    coordinates; coords sends an ambient tuple to abstract coordinates
    (only defined on members).
    """

    group: FinAb
    to_ambient: AbHom
    _coords: dict

    def coords(self, element: Sequence[int]) -> Vec:
        key = tuple(int(x) for x in element)
        try:
            return self._coords[key]
        except KeyError:
            raise NoSolution(f"{key} is not a member of this subgroup") from None

    def members(self) -> frozenset[Vec]:
        return frozenset(self._coords)


def subgroup_from_generators(ambient: FinAb, gens: Sequence[Sequence[int]]) -> Presentation:
    """Present the subgroup generated by gens in invariant-factor form."""
    gens = [ambient.reduce(g) for g in gens]
    m = len(gens)
    if m == 0:
        triv = Presentation(TRIVIAL, AbHom.zero(TRIVIAL, ambient), {ambient.zero(): ()})
        return triv
    # relation lattice of the generators
    rows = [[gens[j][i] for j in range(m)] for i in range(ambient.rank)]
    _, kernel = solve_congruence(rows, [0] * ambient.rank, ambient.factors, n_unknowns=m)
    # kernel is a basis of the full-rank relation lattice in Z^m
    L = [[kernel[j][i] for j in range(len(kernel))] for i in range(m)]
    U, D, _ = smith_normal_form(L)
    Uinv = unimodular_inverse(U)
    keep = [i for i in range(m) if D[i][i] != 1]
    group = FinAb(tuple(D[i][i] for i in keep))
    # ambient image of each kept abstract generator
    cols = []
    for i in keep:
        z = [Uinv[r][i] for r in range(m)]
        vec = ambient.zero()
        for j in range(m):
            vec = ambient.add(vec, ambient.scale(z[j], gens[j]))
        cols.append(vec)
    to_ambient = AbHom.from_columns(group, ambient, cols)
    coords = {}
    for abstract in group.elements():
        coords[to_ambient(abstract)] = abstract
    if len(coords) != group.order:
        raise AssertionError("subgroup presentation is not faithful")
    return Presentation(group, to_ambient, coords)


def quotient_presentation(
    ambient: FinAb, relations: Sequence[Sequence[int]]
) -> tuple[FinAb, AbHom, list[Vec]]:
    """Quotient of ambient by the subgroup generated by relations.

    Returns (Q, projection, section) where section[i] is an ambient
    preimage of the i-th standard generator of Q.
    """
    k = ambient.rank
    rels = [list(ambient.reduce(r)) for r in relations]
    for i, d in enumerate(ambient.factors):
        rels.append([d if j == i else 0 for j in range(k)])
    L = [[rel[i] for rel in rels] for i in range(k)]
    U, D, _ = smith_normal_form(L)
    keep = [i for i in range(min(k, len(rels))) if D[i][i] != 1]
    quotient = FinAb(tuple(D[i][i] for i in keep))
    proj_rows = tuple(tuple(U[i][j] for j in range(k)) for i in keep)
    proj = AbHom(ambient, quotient, proj_rows)
    Uinv = unimodular_inverse(U)
    section = [ambient.reduce([Uinv[r][i] for r in range(k)]) for i in keep]
    return quotient, proj, section


def hom_from_pairs(
    domain: FinAb, codomain: FinAb, pairs: Sequence[tuple[Sequence[int], Sequence[int]]]
) -> AbHom:
    """The homomorphism sending a to b for each pair (a, b).

    The listed domain elements must generate the domain, so the result is
    unique; inconsistent pairs raise NoSolution.
    """
    if span(domain, [p[0] for p in pairs]) != frozenset(domain.elements()):
        raise ValueError("pairs do not generate the domain")
    rows_n = codomain.rank
    cols_n = domain.rank
    nunk = rows_n * cols_n  # unknown matrix entries, row-major

    eq_rows: list[list[int]] = []
    eq_rhs: list[int] = []
    eq_mod: list[int] = []

    def entry(i: int, j: int) -> int:
        return i * cols_n + j

    for a, b in pairs:
        a = domain.reduce(a)
        b = codomain.reduce(b)
        for i in range(rows_n):
            row = [0] * nunk
            for j in range(cols_n):
                row[entry(i, j)] = a[j]
            eq_rows.append(row)
            eq_rhs.append(b[i])
            eq_mod.append(codomain.factors[i])
    # well-definedness constraints
    for j in range(cols_n):
        d = domain.factors[j]
        for i in range(rows_n):
            row = [0] * nunk
            row[entry(i, j)] = d
            eq_rows.append(row)
            eq_rhs.append(0)
            eq_mod.append(codomain.factors[i])

    x, _ = solve_congruence(eq_rows, eq_rhs, eq_mod, n_unknowns=nunk)
    rows = tuple(tuple(x[entry(i, j)] for j in range(cols_n)) for i in range(rows_n))
    return AbHom(domain, codomain, rows)


# ---------------------------------------------------------------------------
# Sections of surjections
# ---------------------------------------------------------------------------

def _section_system(
    f: AbHom, constraints: Sequence[tuple[Sequence[int], Sequence[int]]]
) -> tuple[list[list[int]], list[int], list[int], int, int]:
    D, C = f.domain, f.codomain
    n, m = D.rank, C.rank
    nunk = n * m  # images x_j of the codomain generators, stacked

    def entry(j: int, i: int) -> int:
        return j * n + i

    rows: list[list[int]] = []
    rhs: list[int] = []
    mod: list[int] = []
    # f(x_j) = e_j
    for j in range(m):
        for i in range(m):
            row = [0] * nunk
            for kk in range(n):
                row[entry(j, kk)] = f.matrix[i][kk]
            rows.append(row)
            rhs.append(1 if i == j else 0)
            mod.append(C.factors[i])
    # order constraint: C.factors[j] * x_j = 0 in D
    for j in range(m):
        for i in range(n):
            row = [0] * nunk
            row[entry(j, i)] = C.factors[j]
            rows.append(row)
            rhs.append(0)
            mod.append(D.factors[i])
    # extra value constraints s(a) = b
    for a, b in constraints:
        a = C.reduce(a)
        b = D.reduce(b)
        for i in range(n):
            row = [0] * nunk
            for j in range(m):
                row[entry(j, i)] = a[j]
            rows.append(row)
            rhs.append(b[i])
            mod.append(D.factors[i])
    return rows, rhs, mod, n, m


def _sections_from_solution(
    f: AbHom, x: list[int], kernel: list[list[int]], n: int, m: int, enumerate_all: bool
) -> list[AbHom]:
    D, C = f.domain, f.codomain
    moduli = tuple(D.factors[i] for _ in range(m) for i in range(n))
    flat_group = FinAb(moduli)
    base = flat_group.reduce(x)
    if not enumerate_all:
        candidates = [base]
    else:
        shifts = span(flat_group, [flat_group.reduce(k) for k in kernel])
        if len(shifts) > ENUMERATION_CAP:
            raise ValueError("too many sections to enumerate")
        candidates = sorted(flat_group.add(base, s) for s in shifts)
    out = []
    for cand in candidates:
        cols = [tuple(cand[j * n + i] for i in range(n)) for j in range(m)]
        out.append(AbHom.from_columns(C, D, cols))
    return out


def section_of_surjection(
    f: AbHom,
    constraints: Sequence[tuple[Sequence[int], Sequence[int]]] = (),
) -> AbHom:
    """A homomorphic section s of a surjection f, so f(s(c)) = c.

    Optional constraints are pairs (a, b) demanding s(a) = b.  The section
    returned is canonical: lexicographically smallest matrix among all
    solutions (computed by full enumeration, which is fine at desk scale).
    Raises NotSurjective, NotSplit or ConstraintInfeasible.
    """
    if not f.is_surjective():
        raise NotSurjective("the map is not onto its codomain")
    rows, rhs, mod, n, m = _section_system(f, constraints)
    try:
        x, kernel = solve_congruence(rows, rhs, mod, n_unknowns=n * m)
    except NoSolution:
        if constraints:
            rows0, rhs0, mod0, _, _ = _section_system(f, ())
            try:
                solve_congruence(rows0, rhs0, mod0, n_unknowns=n * m)
            except NoSolution:
                raise NotSplit("the surjection admits no homomorphic section") from None
            raise ConstraintInfeasible(
                "sections exist but none satisfies the requested constraints"
            ) from None
        raise NotSplit("the surjection admits no homomorphic section") from None
    try:
        return _sections_from_solution(f, x, kernel, n, m, enumerate_all=True)[0]
    except ValueError:
        # Too many to enumerate: fall back on the particular solution,
        # which is still deterministic for a fixed matrix.
        return _sections_from_solution(f, x, kernel, n, m, enumerate_all=False)[0]


def enumerate_sections(
    f: AbHom,
    constraints: Sequence[tuple[Sequence[int], Sequence[int]]] = (),
) -> list[AbHom]:
    """All homomorphic sections of f satisfying the constraints, sorted."""
    if not f.is_surjective():
        raise NotSurjective("the map is not onto its codomain")
    rows, rhs, mod, n, m = _section_system(f, constraints)
    try:
        x, kernel = solve_congruence(rows, rhs, mod, n_unknowns=n * m)
    except NoSolution:
        return []
    seen = {}
    for s in _sections_from_solution(f, x, kernel, n, m, enumerate_all=True):
        seen[s.matrix] = s
    return [seen[k] for k in sorted(seen)]


# ---------------------------------------------------------------------------
# Fiber products and Cartesian squares
# ---------------------------------------------------------------------------

def fiber_product(f: AbHom, g: AbHom) -> tuple[FinAb, AbHom, AbHom]:
    """The subgroup {(a, b) : f(a) = g(b)} of A x B in invariant-factor form.

    Returns (P, to_A, to_B) with the two projections.
    """
    if f.codomain != g.codomain:
        raise ValueError("fiber product needs a common codomain")
    A, B, C = f.domain, g.domain, f.codomain
    amb = direct_sum(A, B)
    # kernel of (a, b) -> f(a) - g(b)
    rows = [
        [f.matrix[i][j] for j in range(A.rank)] + [-g.matrix[i][j] for j in range(B.rank)]
        for i in range(C.rank)
    ]
    _, kernel = solve_congruence(rows, [0] * C.rank, C.factors, n_unknowns=amb.rank)
    gens = [amb.reduce(k) for k in kernel]
    pres = subgroup_from_generators(amb, gens)
    emb = pres.to_ambient.matrix
    to_a = AbHom(pres.group, A, tuple(emb[i] for i in range(A.rank)))
    to_b = AbHom(pres.group, B, tuple(emb[A.rank + i] for i in range(B.rank)))
    return pres.group, to_a, to_b


@dataclass(frozen=True)
class CartesianResult:
    ok: bool
    reason: str
    witness: Optional[Vec] = None  # kernel element of the corner, or unhit fiber element

    def __bool__(self):
        return self.ok


def is_cartesian_square(top: AbHom, left: AbHom, right: AbHom, bottom: AbHom) -> CartesianResult:
    """Whether the commuting square (corner A, top A->B, left A->C, right B->D,
    bottom C->D) is Cartesian: the corner maps isomorphically to the fiber
    product of right and bottom.  Returns a witness on failure."""
    if top.domain != left.domain or top.codomain != right.domain or left.codomain != bottom.domain:
        raise ValueError("square shape mismatch")
    lhs = right.compose(top)
    rhs = bottom.compose(left)
    if not lhs.equals(rhs):
        raise NotCommuting("the square does not commute")
    A = top.domain
    P, to_b, to_c = fiber_product(right, bottom)
    # canonical map A -> P, generator by generator
    emb_rows = to_b.matrix + to_c.matrix  # P -> B + C coordinates
    amb = direct_sum(to_b.codomain, to_c.codomain)
    emb = AbHom(P, amb, emb_rows)
    cols = []
    for gen in ([tuple(1 if j == i else 0 for j in range(A.rank)) for i in range(A.rank)]):
        target = concat_vec(top(gen), left(gen))
        cols.append(solve_hom(emb, target).x)
    canonical = AbHom.from_columns(A, P, cols)
    for k in kernel_gens(canonical):
        if k != A.zero():
            return CartesianResult(False, "corner map is not injective", witness=k)
    if image_order(canonical) != P.order:
        hit = canonical.image()
        for el in sorted(P.elements()):
            if el not in hit:
                return CartesianResult(False, "corner map is not surjective", witness=el)
    return CartesianResult(True, "corner maps isomorphically onto the fiber product")
