"""CM contexts, CM types, the plectic action on them, and the half transfer.

A CM context refines a Galois context by an index-2 subgroup H_K of H_F
together with a distinguished conjugation c.  The coset space Sigma_K
carries the conjugation pairing, sits 2-to-1 over Sigma, and CM types
are the subsets picking one coset from each conjugate pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .abelian import AbHom, FinAb, Vec, span
from .errors import BadConjugation, BadIndex, ContextMismatch, InternalError
from .groups import (
    AbelianQuotient,
    CosetSpace,
    Subgroup,
    abelianization,
    is_subgroup_of,
    left_cosets,
    restriction_hom,
    subgroup,
)
from .plectic import GaloisContext, PlecticElement, as_map_on_gamma, embed_galois, enumerate_plectic_group


class CMContext:
    """Galois context plus an index-2 subgroup H_K and a conjugation c."""

    def __init__(self, base: GaloisContext, h_k: Subgroup, c: int):
        G = base.gamma
        if h_k.parent is not G:
            raise ContextMismatch("H_K belongs to a different group")
        if not is_subgroup_of(h_k, base.h_f):
            raise BadIndex("H_K must be a subgroup of H_F")
        if 2 * h_k.order != base.h_f.order:
            raise BadIndex(
                f"H_K must have index 2 in H_F, got index {base.h_f.order / h_k.order:g}")
        if c not in base.h_f:
            raise BadConjugation("the conjugation must lie in H_F")
        if c in h_k:
            raise BadConjugation("the conjugation must not lie in H_K")
        if G.mul(c, c) != G.identity:
            raise BadConjugation("the conjugation must square to the identity")

        self.base = base
        self.h_k = h_k
        self.c = c
        self.sigma_k: CosetSpace = left_cosets(G, h_k)

        # conjugation must fix every H_F-coset from the left, so that the
        # fibers of Sigma_K -> Sigma are exactly the conjugate pairs
        for x, s in enumerate(base.default_section):
            if base.sigma.coset_of(G.mul(c, s)) != x:
                raise BadConjugation(
                    f"left multiplication by c moves the coset of {G.name_of(s)!r}")

        pairing = []
        over = []
        for ci, coset in enumerate(self.sigma_k.cosets):
            rep = coset[0]
            pairing.append(self.sigma_k.coset_of(G.mul(c, rep)))
            over.append(base.sigma.coset_of(rep))
        self.pairing = tuple(pairing)
        self.over = tuple(over)
        for rho, crho in enumerate(self.pairing):
            if crho == rho:
                raise BadConjugation("conjugation pairing has a fixed coset")
            if self.pairing[crho] != rho or self.over[crho] != self.over[rho]:
                raise BadConjugation("conjugation pairing is not an involution over Sigma")

        # phi_x = the coset of s_x, the base point of the fiber over x
        self.phi_of_x = tuple(
            self.sigma_k.coset_of(base.default_section[x]) for x in range(base.degree))
        if sorted(set(self.phi_of_x) | set(self.pairing[p] for p in self.phi_of_x)) != list(
                range(self.sigma_k.index)):
            raise BadConjugation("fibers over Sigma are not conjugate pairs")

        self.h_k_ab: AbelianQuotient = abelianization(h_k)
        self.h_f_ab: AbelianQuotient = base.h_f_ab
        self.sign_group = FinAb((2,) * base.degree)

    @property
    def degree(self) -> int:
        return self.base.degree

    def coset_label(self, rho: int) -> str:
        """A Sigma_K coset is named after its least member."""
        return self.base.gamma.name_of(self.sigma_k.cosets[rho][0])

    def conj_coset(self, rho: int, times: int = 1) -> int:
        return self.pairing[rho] if times % 2 else rho

    def restriction_to_f(self) -> AbHom:
        """Abelianized H_K -> H_F map induced by the inclusion."""
        return restriction_hom(self.h_k_ab, self.h_f_ab)

    def __repr__(self):
        return f"CMContext(r={self.degree}, |Sigma_K|={self.sigma_k.index})"


def cm_context(base: GaloisContext, h_k_members: Sequence[Union[str, int]],
               c: Union[str, int]) -> CMContext:
    h_k = subgroup(base.gamma, h_k_members)
    return CMContext(base, h_k, base.gamma.index_of(c))


# ---------------------------------------------------------------------------
# CM types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CMType:
    """One Sigma_K coset from each conjugate pair."""

    context: CMContext
    phi: frozenset[int]

    def __post_init__(self):
        ctx = self.context
        if len(self.phi) != ctx.degree:
            raise ValueError("a CM type picks one coset per conjugate pair")
        for rho in self.phi:
            if ctx.pairing[rho] in self.phi:
                raise ValueError("a CM type cannot contain a conjugate pair")

    def __eq__(self, other):
        return (
            isinstance(other, CMType)
            and self.context is other.context
            and self.phi == other.phi
        )

    def __hash__(self):
        return hash(tuple(sorted(self.phi)))

    def over_x(self, x: int) -> int:
        """The unique member lying over the Sigma-coset x."""
        for rho in self.phi:
            if self.context.over[rho] == x:
                return rho
        raise InternalError(f"CM type has no member over coset {x}")

    def describe(self) -> list[str]:
        return sorted(
            (self.context.coset_label(rho) for rho in self.phi),
            key=lambda name: self.context.base.gamma.index_of(name),
        )

    def __repr__(self):
        return "CMType({" + ",".join(self.describe()) + "})"


def enumerate_cm_types(ctx: CMContext) -> list[CMType]:
    """All 2^r CM types; bit x of the enumeration index selects the
    conjugate of the base point over x."""
    out = []
    r = ctx.degree
    for bits in range(2 ** r):
        phi = frozenset(
            ctx.conj_coset(ctx.phi_of_x[x], (bits >> x) & 1) for x in range(r)
        )
        out.append(CMType(ctx, phi))
    return out


def cm_type_from_labels(ctx: CMContext, labels: Iterable[Union[str, int]]) -> CMType:
    phi = set()
    for label in labels:
        el = ctx.base.gamma.index_of(label)
        phi.add(ctx.sigma_k.coset_of(el))
    return CMType(ctx, frozenset(phi))


# ---------------------------------------------------------------------------
# Plectic action on Sigma_K and on CM types
# ---------------------------------------------------------------------------

def act_on_sigma_k(cm: CMContext, alpha: PlecticElement, rho: int) -> int:
    """Image of a Sigma_K coset under a plectic element.

    Writes rho = c^b phi_x and returns c^(b + hbar_x) phi_{pi(x)}, where
    hbar_x records whether h_x lies outside H_K.
    """
    if alpha.context is not cm.base:
        raise ContextMismatch("plectic element belongs to a different context")
    x = cm.over[rho]
    b = 0 if rho == cm.phi_of_x[x] else 1
    hbar = 0 if alpha.h[x] in cm.h_k else 1
    return cm.conj_coset(cm.phi_of_x[alpha.pi[x]], b + hbar)


def act_on_sigma_k_via_map(cm: CMContext, alpha: PlecticElement, rho: int) -> int:
    """Same action computed from the bijection of Gamma; used as an oracle."""
    mapping = as_map_on_gamma(alpha)
    member = cm.sigma_k.cosets[rho][0]
    return cm.sigma_k.coset_of(mapping[member])


def act_on_cm_type(cm: CMContext, alpha: PlecticElement, phi: CMType) -> CMType:
    if phi.context is not cm:
        raise ContextMismatch("CM type belongs to a different context")
    return CMType(cm, frozenset(act_on_sigma_k(cm, alpha, rho) for rho in phi.phi))


def conjugation_flip_vector(cm: CMContext, phi: CMType, psi: CMType) -> Vec:
    """m_x in Z/2 per coset x: 0 iff phi and psi agree over x."""
    return tuple(
        0 if phi.over_x(x) == psi.over_x(x) else 1 for x in range(cm.degree)
    )


# ---------------------------------------------------------------------------
# Complex conjugations
# ---------------------------------------------------------------------------

def complex_conjugations(
    cm: CMContext, check_all_sections: bool = False
) -> tuple[tuple[Vec, ...], frozenset[Vec]]:
    """The classes c_x = proj(s_x^-1 c s_x) in H_F^ab and the subgroup
    they generate."""
    G = cm.base.gamma
    ab = cm.h_f_ab

    def conj_vec(section: Sequence[int]) -> tuple[Vec, ...]:
        out = []
        for x in range(cm.degree):
            el = G.prod([G.inv(section[x]), cm.c, section[x]])
            if el not in cm.base.h_f:
                raise InternalError("conjugation left H_F; context validation is broken")
            out.append(ab.project(el))
        return tuple(out)

    cx = conj_vec(cm.base.default_section)
    if check_all_sections:
        for sec in cm.base.all_sections():
            if conj_vec(sec) != cx:
                raise InternalError("complex conjugation classes depend on the section")
    frak_c = span(ab.group, cx)
    return cx, frak_c


def c_product_hom(cm: CMContext) -> AbHom:
    """Sign vectors to H_F^ab: (a_x)_x maps to the product of c_x^(a_x)."""
    cx, _ = complex_conjugations(cm)
    return AbHom.from_columns(cm.sign_group, cm.h_f_ab.group, list(cx))


# ---------------------------------------------------------------------------
# Equivariant sections and the half transfer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivariantSection:
    """Coset representatives w with w_(c rho) = c w_rho."""

    context: CMContext
    w: tuple[int, ...]

    def __post_init__(self):
        cm = self.context
        G = cm.base.gamma
        if len(self.w) != cm.sigma_k.index:
            raise ValueError("need one representative per Sigma_K coset")
        for rho, rep in enumerate(self.w):
            if cm.sigma_k.coset_of(rep) != rho:
                raise ValueError(f"representative {G.name_of(rep)!r} is not in its coset")
            if self.w[cm.pairing[rho]] != G.mul(cm.c, rep):
                raise ValueError("section is not conjugation-equivariant")


def default_equivariant_section(cm: CMContext) -> EquivariantSection:
    """w built from the context section: w over phi_x is s_x, extended by c."""
    G = cm.base.gamma
    w = [None] * cm.sigma_k.index
    for x in range(cm.degree):
        rho = cm.phi_of_x[x]
        w[rho] = cm.base.default_section[x]
        w[cm.pairing[rho]] = G.mul(cm.c, cm.base.default_section[x])
    return EquivariantSection(cm, tuple(w))


def enumerate_equivariant_sections(cm: CMContext) -> list[EquivariantSection]:
    """All |H_K|^r equivariant sections, base representative varying over
    the fiber base point of each pair."""
    G = cm.base.gamma
    base_cosets = [cm.phi_of_x[x] for x in range(cm.degree)]
    out = []
    for choice in itertools.product(*(cm.sigma_k.cosets[rho] for rho in base_cosets)):
        w = [None] * cm.sigma_k.index
        for x, rep in enumerate(choice):
            rho = base_cosets[x]
            w[rho] = rep
            w[cm.pairing[rho]] = G.mul(cm.c, rep)
        out.append(EquivariantSection(cm, tuple(w)))
    return out


def half_transfer(
    cm: CMContext,
    alpha: PlecticElement,
    phi: CMType,
    w: Optional[EquivariantSection] = None,
) -> Vec:
    """Product over the CM type of w_(alpha rho)^-1 alpha(w_rho), in H_K^ab.

    Each factor lies in H_K; the result does not depend on the choice of
    equivariant section, and on left translations it reduces to the
    classical half transfer.
    """
    if phi.context is not cm:
        raise ContextMismatch("CM type belongs to a different context")
    if alpha.context is not cm.base:
        raise ContextMismatch("plectic element belongs to a different context")
    if w is None:
        w = default_equivariant_section(cm)
    elif w.context is not cm:
        raise ContextMismatch("equivariant section belongs to a different context")
    G = cm.base.gamma
    mapping = as_map_on_gamma(alpha)
    ab = cm.h_k_ab
    out = ab.group.zero()
    for rho in sorted(phi.phi):
        target = act_on_sigma_k(cm, alpha, rho)
        factor = G.mul(G.inv(w.w[target]), mapping[w.w[rho]])
        if factor not in cm.h_k:
            raise InternalError("half-transfer factor escaped H_K; corrupted section")
        out = ab.group.add(out, ab.project(factor))
    return out


def tate_half_transfer(
    cm: CMContext, gamma_el: int, phi: CMType, w: Optional[EquivariantSection] = None
) -> Vec:
    """Classical half transfer of a Galois element, evaluated directly."""
    if w is None:
        w = default_equivariant_section(cm)
    G = cm.base.gamma
    ab = cm.h_k_ab
    out = ab.group.zero()
    for rho in sorted(phi.phi):
        target = cm.sigma_k.coset_of(G.mul(gamma_el, w.w[rho]))
        factor = G.prod([G.inv(w.w[target]), gamma_el, w.w[rho]])
        if factor not in cm.h_k:
            raise InternalError("half-transfer factor escaped H_K")
        out = ab.group.add(out, ab.project(factor))
    return out


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Orbit:
    representative: CMType
    members: tuple[CMType, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def resolve_generators(
    cm: CMContext, generators: Union[str, Sequence[PlecticElement]]
) -> list[PlecticElement]:
    if generators == "galois":
        return [embed_galois(cm.base, g) for g in cm.base.gamma.elements()]
    if generators == "full-plectic":
        return enumerate_plectic_group(cm.base)
    gens = list(generators)
    for g in gens:
        if g.context is not cm.base:
            raise ContextMismatch("generator belongs to a different context")
    return gens


def orbit_decomposition(
    cm: CMContext,
    generators: Union[str, Sequence[PlecticElement]],
    types: Optional[Sequence[CMType]] = None,
) -> list[Orbit]:
    """Orbits of CM types under the subgroup generated by the given
    plectic elements, ordered by first occurrence in the canonical type
    enumeration."""
    gens = resolve_generators(cm, generators)
    if types is None:
        types = enumerate_cm_types(cm)
    order_key = {t: i for i, t in enumerate(types)}
    unseen = list(types)
    orbits = []
    while unseen:
        seed = unseen[0]
        orbit = {seed}
        frontier = [seed]
        while frontier:
            nxt = []
            for t in frontier:
                for g in gens:
                    img = act_on_cm_type(cm, g, t)
                    if img not in orbit:
                        if img not in order_key:
                            order_key[img] = len(order_key)
                        orbit.add(img)
                        nxt.append(img)
            frontier = nxt
        members = tuple(sorted(orbit, key=lambda t: order_key[t]))
        orbits.append(Orbit(members[0], members))
        unseen = [t for t in unseen if t not in orbit]
    return orbits
