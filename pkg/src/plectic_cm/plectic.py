"""The plectic group over a finite Galois model.

A context fixes a finite group modelling the absolute Galois group of Q,
a subgroup modelling the Galois group of a totally real field F, the
coset space Sigma and a default section.  Plectic elements are stored in
semidirect-product coordinates (a permutation of Sigma and a tuple of
subgroup elements) relative to the default section; the dictionary to
the presentation as right-equivariant bijections of the big group is an
operation, not a storage format.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .abelian import Vec
from .errors import ContextMismatch
from .groups import (
    AbelianQuotient,
    CosetSpace,
    FiniteGroup,
    Subgroup,
    abelianization,
    left_cosets,
)

DEFAULT_PLECTIC_CAP = 10_000


class GaloisContext:
    """Finite model of Gal(Qbar/Q) with a distinguished subgroup for F."""

    def __init__(self, gamma: FiniteGroup, h_f: Subgroup,
                 section: Optional[Sequence[int]] = None):
        if h_f.parent is not gamma:
            raise ContextMismatch("subgroup belongs to a different group")
        self.gamma = gamma
        self.h_f = h_f
        self.sigma: CosetSpace = left_cosets(gamma, h_f)
        if section is None:
            section = self.sigma.least_section()
        section = tuple(int(s) for s in section)
        for x, s in enumerate(section):
            if self.sigma.coset_of(s) != x:
                raise ValueError(f"section element {gamma.name_of(s)!r} is not in coset {x}")
        self.default_section = section
        self.h_f_ab: AbelianQuotient = abelianization(h_f)

    @property
    def degree(self) -> int:
        """Number of cosets; the degree r of the modelled field."""
        return self.sigma.index

    def all_sections(self) -> Iterator[tuple[int, ...]]:
        """Every section of Sigma, |H_F|^r of them, in a fixed order."""
        return itertools.product(*self.sigma.cosets)

    def section_shift(self, section: Sequence[int]) -> tuple[int, ...]:
        """The tuple t with section[x] = s_x t_x, each t_x in H_F."""
        G = self.gamma
        t = []
        for x, s2 in enumerate(section):
            tx = G.mul(G.inv(self.default_section[x]), s2)
            if tx not in self.h_f:
                raise ValueError("not a section of the same coset space")
            t.append(tx)
        return tuple(t)

    def __repr__(self):
        return f"GaloisContext(|Gamma|={self.gamma.order}, r={self.degree})"


@dataclass(frozen=True)
class PlecticElement:
    """Pair (pi, h): a permutation of Sigma and an H_F-tuple indexed by Sigma."""

    context: GaloisContext
    pi: tuple[int, ...]
    h: tuple[int, ...]

    def __post_init__(self):
        ctx = self.context
        r = ctx.degree
        if len(self.pi) != r or sorted(self.pi) != list(range(r)):
            raise ValueError("pi must be a permutation of the cosets")
        if len(self.h) != r or any(hx not in ctx.h_f for hx in self.h):
            raise ValueError("h must be a tuple of H_F elements")

    def __eq__(self, other):
        return (
            isinstance(other, PlecticElement)
            and self.context is other.context
            and self.pi == other.pi
            and self.h == other.h
        )

    def __hash__(self):
        return hash((self.pi, self.h))

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.pi, self.h)

    def describe(self) -> dict:
        """{pi: [images], h: [element names]} for reports and fixtures."""
        return {
            "pi": list(self.pi),
            "h": [self.context.gamma.name_of(hx) for hx in self.h],
        }

    def __repr__(self):
        names = ",".join(self.context.gamma.name_of(hx) for hx in self.h)
        return f"PlecticElement(pi={self.pi}, h=({names}))"


def _same_context(a: PlecticElement, b: PlecticElement) -> GaloisContext:
    if a.context is not b.context:
        raise ContextMismatch("plectic elements from different contexts")
    return a.context


def identity_element(ctx: GaloisContext) -> PlecticElement:
    r = ctx.degree
    return PlecticElement(ctx, tuple(range(r)), (ctx.gamma.identity,) * r)


def compose(a: PlecticElement, b: PlecticElement) -> PlecticElement:
    """Semidirect product law (pi,h)(pi',h') = (pi pi', (h_{pi'(x)} h'_x)_x)."""
    ctx = _same_context(a, b)
    G = ctx.gamma
    pi = tuple(a.pi[b.pi[x]] for x in range(ctx.degree))
    h = tuple(G.mul(a.h[b.pi[x]], b.h[x]) for x in range(ctx.degree))
    return PlecticElement(ctx, pi, h)


def inverse(a: PlecticElement) -> PlecticElement:
    ctx = a.context
    G = ctx.gamma
    r = ctx.degree
    ipi = [0] * r
    for x in range(r):
        ipi[a.pi[x]] = x
    h = tuple(G.inv(a.h[ipi[x]]) for x in range(r))
    return PlecticElement(ctx, tuple(ipi), h)


def as_map_on_gamma(a: PlecticElement, section: Optional[Sequence[int]] = None) -> tuple[int, ...]:
    """The element as a right-H_F-equivariant bijection of Gamma.

    Returns the image table: gamma = s_x d maps to s_{pi(x)} h_x d.  The
    coordinates (pi, h) are read relative to the given section (default:
    the context's).
    """
    ctx = a.context
    G = ctx.gamma
    s = tuple(section) if section is not None else ctx.default_section
    out = [0] * G.order
    for g in G.elements():
        x = ctx.sigma.coset_of(g)
        d = G.mul(G.inv(s[x]), g)
        out[g] = G.prod([s[a.pi[x]], a.h[x], d])
    return tuple(out)


def factor_map(
    ctx: GaloisContext,
    mapping: Sequence[int],
    section: Optional[Sequence[int]] = None,
) -> PlecticElement:
    """Factor a right-equivariant bijection of Gamma through (pi, h) coordinates."""
    G = ctx.gamma
    s = tuple(section) if section is not None else ctx.default_section
    if sorted(mapping) != list(G.elements()):
        raise ValueError("mapping is not a bijection of Gamma")
    pi = []
    h = []
    for x in range(ctx.degree):
        img = mapping[s[x]]
        px = ctx.sigma.coset_of(img)
        pi.append(px)
        h.append(G.mul(G.inv(s[px]), img))
    el = PlecticElement(ctx, tuple(pi), tuple(h))
    if as_map_on_gamma(el, section=s) != tuple(mapping):
        raise ValueError("mapping is not right-H_F-equivariant")
    return el


def embed_galois(ctx: GaloisContext, gamma_el: int) -> PlecticElement:
    """Left translation by a Galois element, in plectic coordinates."""
    G = ctx.gamma
    s = ctx.default_section
    pi = []
    h = []
    for x in range(ctx.degree):
        px = ctx.sigma.coset_of(G.mul(gamma_el, s[x]))
        pi.append(px)
        h.append(G.prod([G.inv(s[px]), gamma_el, s[x]]))
    return PlecticElement(ctx, tuple(pi), tuple(h))


def rebase(a: PlecticElement, t: Sequence[int]) -> PlecticElement:
    """Coordinates of the same bijection relative to s'_x = s_x t_x.

    This is the conjugation (1,t)^-1 (pi,h) (1,t); the underlying map on
    Gamma is unchanged.
    """
    ctx = a.context
    if len(t) != ctx.degree or any(tx not in ctx.h_f for tx in t):
        raise ValueError("t must be a tuple of H_F elements")
    r = ctx.degree
    ident = tuple(range(r))
    shift = PlecticElement(ctx, ident, tuple(t))
    return compose(inverse(shift), compose(a, shift))


def product_map(a: PlecticElement) -> Vec:
    """Product of the h-coordinates in the abelianization of H_F.

    Independent of the section used to factor the element; restricted to
    the image of embed_galois it equals the transfer map.
    """
    ctx = a.context
    ab = ctx.h_f_ab
    out = ab.group.zero()
    for hx in a.h:
        out = ab.group.add(out, ab.project(hx))
    return out


def plectic_group_order(ctx: GaloisContext) -> int:
    import math
    return math.factorial(ctx.degree) * (ctx.h_f.order ** ctx.degree)


def enumerate_plectic_group(ctx: GaloisContext, cap: int = DEFAULT_PLECTIC_CAP) -> list[PlecticElement]:
    """All plectic elements, in a fixed order; refuses above the cap."""
    total = plectic_group_order(ctx)
    if total > cap:
        raise ValueError(f"plectic group of order {total} exceeds the cap of {cap}")
    r = ctx.degree
    out = []
    for pi in itertools.permutations(range(r)):
        for h in itertools.product(ctx.h_f.members, repeat=r):
            out.append(PlecticElement(ctx, pi, h))
    return out
