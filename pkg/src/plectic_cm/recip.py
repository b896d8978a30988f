"""Finite models of the reciprocity diagrams, splittings and the Taniyama element.

A reciprocity model attaches finite abelian groups I_Q, I_F, I_K (idele
class models) to a CM context, together with reciprocity surjections
onto the abelianization models, the norm and inclusion maps between
them, a sign embedding and a cyclotomic section.  The diagram squares
are validated on load; whether the two right-hand squares are Cartesian
and whether the sign bijection holds are recorded as axiom flags, never
assumed.  Every downstream statement that needs a flag checks it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .abelian import (
    AbHom,
    CartesianResult,
    FinAb,
    Vec,
    concat_vec,
    direct_sum,
    enumerate_sections,
    fiber_product,
    image_order,
    is_cartesian_square,
    kernel_elements,
    section_of_surjection,
    solve_hom,
    span,
)
from .cm import CMContext, CMType, EquivariantSection, c_product_hom, complex_conjugations, half_transfer
from .errors import (
    ConstraintInfeasible,
    DiagramNotCommuting,
    IncompatibleInclusion,
    InternalError,
    NoSolution,
    NotCartesian,
    NotSurjective,
)
from .groups import AbelianQuotient, Subgroup, abelianization, restriction_hom, transfer_between, transfer_hom
from .plectic import PlecticElement, embed_galois, product_map


@dataclass(frozen=True)
class AxiomFlags:
    """Which optional diagram axioms this model actually satisfies."""

    top_cartesian: bool
    bottom_cartesian: bool
    sign_formula: bool     # rec_F after sign_F equals the conjugation product map
    sign_bijection: bool   # and the sign classes biject onto the conjugation subgroup
    top_reason: str = ""
    bottom_reason: str = ""

    def as_dict(self) -> dict:
        return {
            "top_cartesian": self.top_cartesian,
            "bottom_cartesian": self.bottom_cartesian,
            "sign_formula": self.sign_formula,
            "sign_bijection": self.sign_bijection,
        }


class RecipModel:
    """Validated finite model of the idele-class diagram over a CM context."""

    def __init__(
        self,
        cm: CMContext,
        i_q: FinAb,
        i_f: FinAb,
        i_k: FinAb,
        rec_q: AbHom,
        rec_f: AbHom,
        rec_k: AbHom,
        n_kf: AbHom,
        i_kf: AbHom,
        i_fq: AbHom,
        sign_f: AbHom,
        chi_cyc: AbHom,
        cl_k: Optional[FinAb] = None,
        cl_map: Optional[AbHom] = None,
        name: str = "",
    ):
        self.cm = cm
        self.name = name
        base = cm.base
        self.gamma_ab: AbelianQuotient = abelianization(
            Subgroup(base.gamma, tuple(base.gamma.elements())))
        self.a_q = self.gamma_ab.group
        self.a_f = cm.h_f_ab.group
        self.a_k = cm.h_k_ab.group
        self.i_q, self.i_f, self.i_k = i_q, i_f, i_k

        def expect(hom: AbHom, dom: FinAb, cod: FinAb, what: str) -> AbHom:
            if hom.domain != dom or hom.codomain != cod:
                raise ValueError(f"{what} has the wrong domain or codomain")
            return hom

        self.rec_q = expect(rec_q, i_q, self.a_q, "rec_Q")
        self.rec_f = expect(rec_f, i_f, self.a_f, "rec_F")
        self.rec_k = expect(rec_k, i_k, self.a_k, "rec_K")
        self.n_kf = expect(n_kf, i_k, i_f, "the norm map")
        self.i_kf = expect(i_kf, i_f, i_k, "the K/F inclusion")
        self.i_fq = expect(i_fq, i_q, i_f, "the F/Q inclusion")
        self.sign_f = expect(sign_f, cm.sign_group, i_f, "the sign embedding")
        self.chi_cyc = expect(chi_cyc, self.a_q, i_q, "the cyclotomic section")
        self.cl_k = cl_k if cl_k is not None else i_k
        self.cl_map = cl_map if cl_map is not None else AbHom.identity(i_k)
        expect(self.cl_map, i_k, self.cl_k, "the class-group map")

        for rec, label in ((self.rec_q, "rec_Q"), (self.rec_f, "rec_F"), (self.rec_k, "rec_K")):
            if not rec.is_surjective():
                raise NotSurjective(f"{label} is not surjective")

        # derived arrows on the Galois side
        G = base.gamma
        self.res = restriction_hom(cm.h_k_ab, cm.h_f_ab)
        self.v_kf = transfer_hom_between(base.h_f, cm.h_k, cm.h_f_ab, cm.h_k_ab)
        self.v_fq = transfer_hom(G, base.h_f, self.gamma_ab, cm.h_f_ab)
        self.c_product = c_product_hom(cm)

        # the three commuting squares demanded of every model
        if not self.rec_f.compose(self.n_kf).equals(self.res.compose(self.rec_k)):
            raise DiagramNotCommuting("norm", "rec_F . N_KF != res . rec_K")
        if not self.rec_k.compose(self.i_kf).equals(self.v_kf.compose(self.rec_f)):
            raise DiagramNotCommuting("inclusion", "rec_K . i_KF != V_KF . rec_F")
        if not self.rec_f.compose(self.i_fq).equals(self.v_fq.compose(self.rec_q)):
            raise DiagramNotCommuting("base-change", "rec_F . i_FQ != V_FQ . rec_Q")
        if not self.rec_q.compose(self.chi_cyc).equals(AbHom.identity(self.a_q)):
            raise DiagramNotCommuting("cyclotomic", "rec_Q . chi_cyc != id")

        self.flags = self._compute_flags()

    # -- flags ---------------------------------------------------------------

    def _compute_flags(self) -> AxiomFlags:
        top = is_cartesian_square(self.rec_k, self.n_kf, self.res, self.rec_f)
        bottom = is_cartesian_square(self.rec_f, self.i_kf, self.v_kf, self.rec_k)
        formula = self.rec_f.compose(self.sign_f).equals(self.c_product)
        _, frak_c = complex_conjugations(self.cm)
        bijection = formula and self.cm.sign_group.order == len(frak_c)
        return AxiomFlags(
            top_cartesian=top.ok,
            bottom_cartesian=bottom.ok,
            sign_formula=formula,
            sign_bijection=bijection,
            top_reason=top.reason,
            bottom_reason=bottom.reason,
        )

    # -- conveniences ----------------------------------------------------------

    def frak_c(self) -> frozenset[Vec]:
        _, frak = complex_conjugations(self.cm)
        return frak

    def kernel_rec_f(self) -> frozenset[Vec]:
        return kernel_elements(self.rec_f)

    def cyclo_constraints(self) -> list[tuple[Vec, Vec]]:
        """Value constraints pinning a splitting on transfer images."""
        out = []
        for gen in self.a_q.generators():
            out.append((self.v_fq(gen), self.i_fq(self.chi_cyc(gen))))
        return out

    def sign_constraints(self) -> list[tuple[Vec, Vec]]:
        """Value constraints making a splitting invert the sign classes."""
        out = []
        for gen in self.cm.sign_group.generators():
            out.append((self.c_product(gen), self.sign_f(gen)))
        return out

    def __repr__(self):
        return f"RecipModel({self.name or 'unnamed'}, I_F={self.i_f.factors})"


def transfer_hom_between(
    big: Subgroup, small: Subgroup, source_ab: AbelianQuotient, target_ab: AbelianQuotient
) -> AbHom:
    """Transfer from a subgroup to a finite-index subgroup of it, on
    abelianizations."""
    from .abelian import hom_from_pairs

    pairs = []
    for g in big.members:
        pairs.append((source_ab.project(g), transfer_between(big, small, g, target_ab)))
    return hom_from_pairs(source_ab.group, target_ab.group, pairs)


# ---------------------------------------------------------------------------
# Synthetic Cartesian models
# ---------------------------------------------------------------------------

def synthesize_cartesian_model(
    cm: CMContext,
    i_f: Optional[FinAb] = None,
    rec_f: Optional[AbHom] = None,
    sign_f: Optional[AbHom] = None,
    name: str = "synthetic",
) -> RecipModel:
    """Build a model whose norm square is Cartesian by construction.

    I_K is the fiber product of rec_F with the restriction map; the norm
    and rec_K are its projections.  The K/F inclusion is induced by
    doubling on I_F, the F/Q inclusion by a canonical cyclotomic-
    compatible section of rec_F.  I_Q is the abelianization model of the
    full group with identity reciprocity.
    """
    base = cm.base
    a_f = cm.h_f_ab.group
    if i_f is None:
        i_f = a_f
    if rec_f is None:
        if i_f != a_f:
            raise ValueError("rec_f is required when i_f is not the abelianization model")
        rec_f = AbHom.identity(a_f)
    if rec_f.domain != i_f or rec_f.codomain != a_f:
        raise ValueError("rec_f has the wrong domain or codomain")
    if not rec_f.is_surjective():
        raise NotSurjective("rec_F is not surjective")

    gamma_ab = abelianization(Subgroup(base.gamma, tuple(base.gamma.elements())))
    a_q = gamma_ab.group
    a_k = cm.h_k_ab.group
    res = restriction_hom(cm.h_k_ab, cm.h_f_ab)
    v_kf = transfer_hom_between(base.h_f, cm.h_k, cm.h_f_ab, cm.h_k_ab)
    v_fq = transfer_hom(base.gamma, base.h_f, gamma_ab, cm.h_f_ab)
    c_prod = c_product_hom(cm)

    # canonical section of rec_F compatible with the cyclotomic square
    chi_star = section_of_surjection(rec_f)
    i_fq = chi_star.compose(v_fq)

    if sign_f is None:
        sign_f = chi_star.compose(c_prod)

    i_k, n_kf, rec_k = fiber_product(rec_f, res)

    # i_KF: doubling on the idele side, transfer on the Galois side
    emb = AbHom(i_k, direct_sum(i_f, a_k), n_kf.matrix + rec_k.matrix)
    cols = []
    for gen in i_f.generators():
        target = concat_vec(i_f.scale(2, gen), v_kf(rec_f(gen)))
        try:
            cols.append(solve_hom(emb, target).x)
        except NoSolution:
            raise IncompatibleInclusion(
                "no K/F inclusion makes the lower square commute") from None
    full_cols = []
    gi = 0
    for j, d in enumerate(i_f.factors):
        if d > 1:
            full_cols.append(cols[gi])
            gi += 1
        else:
            full_cols.append(i_k.zero())
    i_kf = AbHom.from_columns(i_f, i_k, full_cols)

    model = RecipModel(
        cm,
        i_q=a_q,
        i_f=i_f,
        i_k=i_k,
        rec_q=AbHom.identity(a_q),
        rec_f=rec_f,
        rec_k=rec_k,
        n_kf=n_kf,
        i_kf=i_kf,
        i_fq=i_fq,
        sign_f=sign_f,
        chi_cyc=AbHom.identity(a_q),
        name=name,
    )
    if not model.flags.top_cartesian:
        raise InternalError("synthetic model failed to be Cartesian")
    return model


# ---------------------------------------------------------------------------
# Splittings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Splitting:
    """A homomorphic section chi_F of rec_F.

    Always a section and always compatible with the cyclotomic square;
    compatibility with the sign classes is additionally required whenever
    the model's sign-bijection flag is set, and recorded either way.
    """

    model: RecipModel
    chi_f: AbHom
    cyclo_holds: bool = field(init=False)
    sign_compat_holds: bool = field(init=False)

    def __post_init__(self):
        m = self.model
        if self.chi_f.domain != m.a_f or self.chi_f.codomain != m.i_f:
            raise ValueError("chi_F has the wrong domain or codomain")
        if not m.rec_f.compose(self.chi_f).equals(AbHom.identity(m.a_f)):
            raise ValueError("chi_F is not a section of rec_F")
        cyclo = self.chi_f.compose(m.v_fq).equals(m.i_fq.compose(m.chi_cyc))
        sign = self.chi_f.compose(m.c_product).equals(m.sign_f)
        if not cyclo:
            raise ConstraintInfeasible("chi_F is not compatible with the cyclotomic square")
        if m.flags.sign_bijection and not sign:
            raise ConstraintInfeasible(
                "chi_F does not invert the sign bijection, which this model satisfies")
        object.__setattr__(self, "cyclo_holds", cyclo)
        object.__setattr__(self, "sign_compat_holds", sign)

    def fingerprint(self) -> str:
        blob = repr((self.model.i_f.factors, self.chi_f.matrix)).encode()
        return hashlib.sha1(blob).hexdigest()[:12]

    def solver(self) -> "TaniyamaSolver":
        cached = getattr(self, "_solver", None)
        if cached is None:
            cached = TaniyamaSolver(self)
            object.__setattr__(self, "_solver", cached)
        return cached

    def __repr__(self):
        return f"Splitting({self.fingerprint()})"


def make_splitting(model: RecipModel, sign_compat: Union[bool, str] = "auto") -> Splitting:
    """Canonical splitting of rec_F, compatible with the cyclotomic square.

    sign_compat=True additionally demands compatibility with the sign
    classes, False omits it, and "auto" demands it when feasible.  Raises
    NotSplit or ConstraintInfeasible.
    """
    constraints = model.cyclo_constraints()
    if sign_compat is True:
        chi = section_of_surjection(model.rec_f, constraints + model.sign_constraints())
    elif sign_compat == "auto":
        try:
            chi = section_of_surjection(model.rec_f, constraints + model.sign_constraints())
        except ConstraintInfeasible:
            chi = section_of_surjection(model.rec_f, constraints)
    else:
        chi = section_of_surjection(model.rec_f, constraints)
    return Splitting(model, chi)


def enumerate_splittings(model: RecipModel) -> list[Splitting]:
    """All admissible splittings: sections of rec_F compatible with the
    cyclotomic square, plus the sign classes when the model's flag holds."""
    constraints = model.cyclo_constraints()
    if model.flags.sign_bijection:
        constraints = constraints + model.sign_constraints()
    return [Splitting(model, s) for s in enumerate_sections(model.rec_f, constraints)]


# ---------------------------------------------------------------------------
# The Taniyama element
# ---------------------------------------------------------------------------

class TaniyamaSolver:
    """Caches the joint (rec_K, N_KF) solves behind the Taniyama element."""

    def __init__(self, split: Splitting):
        self.split = split
        m = split.model
        self.joint = AbHom(
            m.i_k, direct_sum(m.a_k, m.i_f), m.rec_k.matrix + m.n_kf.matrix)
        self._cache: dict[Vec, Vec] = {}

    def lift(self, half: Vec) -> Vec:
        """The unique f with rec_K(f) = half and N_KF(f) = chi_F(half | F)."""
        if half in self._cache:
            return self._cache[half]
        m = self.split.model
        target = concat_vec(half, self.split.chi_f(m.res(half)))
        try:
            sol = solve_hom(self.joint, target)
        except NoSolution:
            raise NoSolution(
                "no idele class lifts this half transfer; the model is inconsistent") from None
        if any(k != m.i_k.zero() for k in sol.kernel_gens):
            raise InternalError("Taniyama lift is not unique despite the Cartesian flag")
        self._cache[half] = sol.x
        return sol.x


def taniyama(
    split: Splitting,
    alpha: PlecticElement,
    phi: CMType,
    w: Optional[EquivariantSection] = None,
    solver: Optional[TaniyamaSolver] = None,
) -> Vec:
    """The plectic Taniyama element of alpha at the CM type phi.

    Requires the model's norm square to be Cartesian, which makes the two
    defining equations (reciprocity value and norm value) have exactly
    one common solution.
    """
    model = split.model
    if not model.flags.top_cartesian:
        raise NotCartesian("the norm square of this model is not Cartesian")
    if solver is None:
        solver = split.solver()
    half = half_transfer(model.cm, alpha, phi, w)
    return solver.lift(half)


@dataclass(frozen=True)
class GaloisTaniyama:
    f: Vec
    unique: bool
    kernel_order: int


def taniyama_galois(
    split: Splitting,
    gamma_el: int,
    phi: CMType,
    w: Optional[EquivariantSection] = None,
) -> GaloisTaniyama:
    """The classical characterization of the Taniyama element of a Galois
    element: rec_K(f) equals the half transfer and (1+c)f equals the
    cyclotomic class, with 1+c computed as the inclusion after the norm.

    Used as an oracle; uniqueness holds iff the joint kernel is trivial,
    which is reported rather than assumed.
    """
    from .cm import tate_half_transfer

    m = split.model
    half = tate_half_transfer(m.cm, gamma_el, phi, w)
    one_plus_c = m.i_kf.compose(m.n_kf)
    joint = AbHom(m.i_k, direct_sum(m.a_k, m.i_k), m.rec_k.matrix + one_plus_c.matrix)
    gamma_bar = m.gamma_ab.project(gamma_el)
    target = concat_vec(half, m.i_kf(m.i_fq(m.chi_cyc(gamma_bar))))
    sol = solve_hom(joint, target)
    kernel = span(m.i_k, sol.kernel_gens)
    return GaloisTaniyama(f=sol.x, unique=len(kernel) == 1, kernel_order=len(kernel))


# ---------------------------------------------------------------------------
# The CM plectic group
# ---------------------------------------------------------------------------

def membership_cm_group(split: Splitting, i_r_members: frozenset[Vec],
                        alpha: PlecticElement) -> bool:
    """Whether chi_F of the product map lands in the torus idele classes."""
    u = split.chi_f(product_map(alpha))
    return u in i_r_members


def transfer_image_predicate(model: RecipModel, alpha: PlecticElement) -> bool:
    """Whether the product map lands in the image of the Q-to-F transfer."""
    return product_map(alpha) in span(model.a_f, [model.v_fq(g) for g in model.a_q.generators()])
