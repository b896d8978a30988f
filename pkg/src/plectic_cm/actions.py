"""Torus models, CM points, and the plectic actions on points and components.

A torus model picks a sign subgroup and a subgroup of idele classes and
forms the canonical component group: the quotient of their product by
the diagonal classes of rational sign elements and by the connected
kernel.  CM points are tuples of model data (type, ideal class, sign
vector, determinant class, level class); the plectic action rewrites
them through the Taniyama element, and the component map must commute
with everything, which the equivariance checker verifies rather than
assumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .abelian import (
    AbHom,
    FinAb,
    Presentation,
    Vec,
    concat_vec,
    kernel_elements,
    solve_hom,
    span,
    subgroup_from_generators,
)
from .cm import CMType, act_on_cm_type, conjugation_flip_vector, enumerate_cm_types
from .errors import (
    ContextMismatch,
    DeltaOutsideModel,
    NoSolution,
    NotCartesian,
    NotInCMGroup,
    NotInPi0Group,
)
from .plectic import PlecticElement, embed_galois, enumerate_plectic_group, product_map
from .recip import RecipModel, Splitting, membership_cm_group, taniyama


def _pm_to_exponent(vec: Sequence[int]) -> Vec:
    """Accept a sign vector as +-1 entries or as 0/1 exponents."""
    if any(v == -1 for v in vec):
        if not set(vec) <= {1, -1}:
            raise ValueError(f"sign vector {tuple(vec)} mixes +-1 and exponent forms")
        return tuple(1 if v == -1 else 0 for v in vec)
    if not set(vec) <= {0, 1}:
        raise ValueError(f"bad sign vector {tuple(vec)}")
    return tuple(int(v) for v in vec)


class TorusModel:
    """Sign subgroup, idele-class subgroup and the component group they span.

    The component group is the quotient of vz x I_R by the diagonal sign
    classes and by the part of the reciprocity kernel lying in I_R; the
    component-to-Galois map sends a class to the conjugation product of
    its sign part times the reciprocity image of its class part.
    """

    def __init__(
        self,
        model: RecipModel,
        name: str,
        vz_gens: Sequence[Sequence[int]],
        i_r_gens: Sequence[Sequence[int]],
    ):
        self.model = model
        self.name = name
        cm = model.cm
        sign_group = cm.sign_group

        self.vz: Presentation = subgroup_from_generators(
            sign_group, [_pm_to_exponent(v) for v in vz_gens])
        self.i_r: Presentation = subgroup_from_generators(model.i_f, i_r_gens)
        self.vz_members = self.vz.members()
        self.i_r_members = self.i_r.members()

        for gen in model.a_q.generators():
            if model.i_fq(model.chi_cyc(gen)) not in self.i_r_members:
                raise ValueError(
                    f"torus {name!r} does not contain the cyclotomic classes")
        for v in self.vz_members:
            if model.sign_f(v) not in self.i_r_members:
                raise ValueError(
                    f"torus {name!r}: sign class of {v} is outside the torus classes")

        v_ab = self.vz.group
        r_ab = self.i_r.group
        ambient = FinAb(v_ab.factors + r_ab.factors)
        self._ambient = ambient
        self._v_rank = v_ab.rank

        relations: list[Vec] = []
        for gen in v_ab.generators():
            sign_class = model.sign_f(self.vz.to_ambient(gen))
            relations.append(concat_vec(gen, self.i_r.coords(sign_class)))
        kernel_in_r = sorted(kernel_elements(model.rec_f) & self.i_r_members)
        for k in kernel_in_r:
            relations.append(concat_vec(v_ab.zero(), self.i_r.coords(k)))

        from .abelian import quotient_presentation

        self.p_r, self.quot, reps = quotient_presentation(ambient, relations)

        # component-to-Galois map: conjugation product on signs, rec_F on classes
        mu0_cols = []
        for i in range(ambient.rank):
            unit = tuple(1 if j == i else 0 for j in range(ambient.rank))
            mu0_cols.append(self._mu0(unit))
        mu0 = AbHom.from_columns(ambient, model.a_f, mu0_cols)
        self.mu = AbHom.from_columns(self.p_r, model.a_f, [mu0(rep) for rep in reps])
        if not self.mu.compose(self.quot).equals(mu0):
            raise ValueError(
                f"torus {name!r}: the component group does not respect the Galois map "
                "(sign classes and conjugations disagree)")

        self.iota_q = AbHom.from_columns(
            model.i_q, r_ab,
            [self.i_r.coords(model.i_fq(g)) if d > 1 else r_ab.zero()
             for g, d in _padded_generators(model.i_q)])

        # classes of I_R together with all sign classes: the presentation
        # ambiguity of a determinant class
        self.ambiguity = span(
            model.i_f,
            [self.i_r.to_ambient(g) for g in r_ab.generators()]
            + [model.sign_f(g) for g in model.cm.sign_group.generators()],
        )

    def _mu0(self, ambient_vec: Sequence[int]) -> Vec:
        m = self.model
        v_part = ambient_vec[: self._v_rank]
        r_part = ambient_vec[self._v_rank:]
        sign = m.c_product(self.vz.to_ambient(v_part))
        cls = m.rec_f(self.i_r.to_ambient(r_part))
        return m.a_f.add(sign, cls)

    def class_component(self, u: Vec) -> Vec:
        """Component of a torus idele class (all-positive sign part)."""
        if u not in self.i_r_members:
            raise DeltaOutsideModel(f"class {u} is not in the torus classes of {self.name!r}")
        return self.quot(concat_vec(self.vz.group.zero(), self.i_r.coords(u)))

    def __repr__(self):
        return f"TorusModel({self.name!r}, |V_Z|={len(self.vz_members)}, |I_R|={len(self.i_r_members)}, pi0={self.p_r.factors})"


def _padded_generators(group: FinAb):
    """(generator-or-zero, factor) per coordinate, for column building."""
    out = []
    for i, d in enumerate(group.factors):
        unit = tuple(1 if j == i else 0 for j in range(group.rank))
        out.append((unit, d))
    return out


def make_torus(
    model: RecipModel,
    name: str,
    vz: Union[str, Sequence[Sequence[int]]],
    i_r: Union[str, Sequence[Sequence[int]]],
) -> TorusModel:
    """Torus model from generator data or the shorthands
    vz in {"full", "diagonal"} and i_r in {"full", "cyclotomic"}."""
    cm = model.cm
    if vz == "full":
        vz_gens = list(cm.sign_group.generators())
    elif vz == "diagonal":
        vz_gens = [(1,) * cm.degree] if cm.degree else []
    else:
        vz_gens = [tuple(v) for v in vz]
    if i_r == "full":
        i_r_gens = list(model.i_f.generators())
    elif i_r == "cyclotomic":
        i_r_gens = [model.i_fq(model.chi_cyc(g)) for g in model.a_q.generators()]
    else:
        i_r_gens = [tuple(v) for v in i_r]
    return TorusModel(model, name, vz_gens, i_r_gens)


# ---------------------------------------------------------------------------
# CM points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CMPoint:
    """Model data of a CM point: type, ideal class, sign vector (kept
    normalized to all-positive), determinant class and level class."""

    phi: CMType
    a: Vec
    sgn_t: Vec
    delta: Vec
    e: Vec

    def describe(self) -> dict:
        return {
            "phi": self.phi.describe(),
            "a": list(self.a),
            "sgn_t": list(self.sgn_t),
            "delta": list(self.delta),
            "e": list(self.e),
        }


def make_cm_point(
    model: RecipModel,
    torus: TorusModel,
    phi: CMType,
    a: Optional[Sequence[int]] = None,
    e: Optional[Sequence[int]] = None,
    delta: Optional[Sequence[int]] = None,
) -> CMPoint:
    """Validated CM point; delta defaults to the norm class of e."""
    a = model.cl_k.reduce(a) if a is not None else model.cl_k.zero()
    e = model.i_k.reduce(e) if e is not None else model.i_k.zero()
    delta = model.i_f.reduce(delta) if delta is not None else model.n_kf(e)
    point = CMPoint(phi, a, model.cm.sign_group.zero(), delta, e)
    validate_cm_point(model, torus, point)
    return point


def validate_cm_point(model: RecipModel, torus: TorusModel, point: CMPoint) -> None:
    if point.phi.context is not model.cm:
        raise ContextMismatch("CM type belongs to a different context")
    if point.sgn_t != model.cm.sign_group.zero():
        raise ValueError("CM points are kept normalized to all-positive signs")
    if point.delta not in torus.i_r_members:
        raise DeltaOutsideModel("determinant class is not a torus idele class")
    diff = model.i_f.sub(point.delta, model.n_kf(point.e))
    if diff not in torus.ambiguity:
        raise ValueError(
            "determinant class is inconsistent with the level class "
            "beyond the torus-and-sign ambiguity")


def enumerate_cm_points(
    model: RecipModel,
    torus: TorusModel,
    rich: bool = False,
) -> list[CMPoint]:
    """Deterministic seed set of CM points valid on this torus.

    Level classes run over those whose norm class stays inside the
    presentation ambiguity; determinant classes run over torus generators.
    """
    e_candidates = [e for e in sorted(model.i_k.elements())
                    if model.n_kf(e) in torus.ambiguity]
    if not rich and len(e_candidates) > 4:
        e_candidates = e_candidates[:4]
    a_candidates = [model.cl_k.zero()] + [g for g in model.cl_k.generators()]
    if rich:
        a_candidates = sorted(model.cl_k.elements())
    deltas = [model.i_f.zero()] + [torus.i_r.to_ambient(g) for g in torus.i_r.group.generators()]
    if not rich and len(deltas) > 3:
        deltas = deltas[:3]
    seen = {}
    for phi in enumerate_cm_types(model.cm):
        for e in e_candidates:
            for a in a_candidates:
                for delta in deltas:
                    p = make_cm_point(model, torus, phi, a=a, e=e, delta=delta)
                    seen[(p.phi, p.a, p.delta, p.e)] = p
    return list(seen.values())


# ---------------------------------------------------------------------------
# Galois and plectic actions on CM points
# ---------------------------------------------------------------------------

def galois_act_on_cm_point(split: Splitting, gamma_el: int, point: CMPoint) -> CMPoint:
    """Conjugate of a CM point by a Galois element.

    The type moves, the ideal and level classes are twisted by the
    Taniyama element, and the determinant class by the cyclotomic class.
    """
    model = split.model
    if not model.flags.top_cartesian:
        raise NotCartesian("the norm square of this model is not Cartesian")
    alpha = embed_galois(model.cm.base, gamma_el)
    f = taniyama(split, alpha, point.phi)
    gamma_bar = model.gamma_ab.project(gamma_el)
    return CMPoint(
        phi=act_on_cm_type(model.cm, alpha, point.phi),
        a=model.cl_k.add(point.a, model.cl_map(f)),
        sgn_t=point.sgn_t,
        delta=model.i_f.add(point.delta, model.i_fq(model.chi_cyc(gamma_bar))),
        e=model.i_k.add(point.e, f),
    )


def plectic_act_on_cm_point(
    split: Splitting,
    torus: TorusModel,
    alpha: PlecticElement,
    point: CMPoint,
) -> CMPoint:
    """Plectic conjugate of a CM point.

    Requires membership in the CM plectic group for this torus.  The sign
    of the polarization twist must land in the class predicted by the
    conjugation flips; a mismatch is a model defect and raises.
    """
    from .errors import SignViolation

    model = split.model
    if not model.flags.top_cartesian:
        raise NotCartesian("the norm square of this model is not Cartesian")
    if not membership_cm_group(split, torus.i_r_members, alpha):
        raise NotInCMGroup("chi_F of the product map is not a torus idele class")
    f = taniyama(split, alpha, point.phi)
    u = split.chi_f(product_map(alpha))
    new_phi = act_on_cm_type(model.cm, alpha, point.phi)
    flips = conjugation_flip_vector(model.cm, point.phi, new_phi)
    chi_class = model.i_f.sub(u, model.n_kf(f))
    if chi_class != model.sign_f(flips):
        raise SignViolation(
            f"polarization twist {chi_class} is not the sign class of the flips {flips}")
    return CMPoint(
        phi=new_phi,
        a=model.cl_k.add(point.a, model.cl_map(f)),
        sgn_t=point.sgn_t,
        delta=model.i_f.add(point.delta, u),
        e=model.i_k.add(point.e, f),
    )


def cm_group_members(split: Splitting, torus: TorusModel) -> list[PlecticElement]:
    """All plectic elements lying in the CM group of this torus."""
    return [
        al for al in enumerate_plectic_group(split.model.cm.base)
        if membership_cm_group(split, torus.i_r_members, al)
    ]


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------

def pi0_of_cm_point(torus: TorusModel, point: CMPoint) -> Vec:
    """Component of a CM point: all-positive signs and its determinant class."""
    return torus.class_component(point.delta)


def pi0_plectic_action(
    torus: TorusModel,
    split: Splitting,
    alpha: PlecticElement,
    q: Vec,
    u: Optional[Vec] = None,
) -> Vec:
    """Action of a plectic element on a component, by multiplication.

    The element must admit a torus class u whose component maps to the
    product-map value under the component-to-Galois map; for CM-group
    members u is chi_F of the product map.
    """
    model = split.model
    target = product_map(alpha)
    if u is None:
        cand = split.chi_f(target)
        if cand in torus.i_r_members:
            u = cand
        else:
            comp = torus.mu.compose(torus.quot)
            incl_cols = [concat_vec(torus.vz.group.zero(), g)
                         for g in torus.i_r.group.generators()]
            helper = AbHom.from_columns(
                FinAb(tuple(d for d in torus.i_r.group.factors if d > 1)),
                model.a_f,
                [comp(c) for c in incl_cols])
            try:
                sol = solve_hom(helper, target)
            except NoSolution:
                raise NotInPi0Group(
                    "no torus class maps to the product-map value") from None
            padded = _unpad(torus.i_r.group, sol.x)
            u = torus.i_r.to_ambient(padded)
    lam = lambda_of(torus, u)
    if torus.mu(lam) != target:
        raise NotInPi0Group(
            "the supplied class does not satisfy the component fiber condition")
    return torus.p_r.add(lam, q)


def _unpad(group: FinAb, reduced: Vec) -> Vec:
    out = []
    i = 0
    for d in group.factors:
        if d > 1:
            out.append(reduced[i])
            i += 1
        else:
            out.append(0)
    return tuple(out)


def lambda_of(torus: TorusModel, u: Vec) -> Vec:
    """Component class of a torus idele class with all-positive signs."""
    return torus.class_component(u)


def pi0_galois_value(torus: TorusModel, gamma_el: int) -> Vec:
    """The multiplication rule for Galois elements: the component of the
    cyclotomic class pushed into the torus."""
    model = torus.model
    gamma_bar = model.gamma_ab.project(gamma_el)
    coords = torus.iota_q(model.chi_cyc(gamma_bar))
    return torus.quot(concat_vec(torus.vz.group.zero(), coords))


# ---------------------------------------------------------------------------
# Equivariance sweep
# ---------------------------------------------------------------------------

@dataclass
class Pi0Outcome:
    checked_pairs: int = 0
    checked_embeddings: int = 0
    checked_galois: int = 0
    failures: list = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = []

    @property
    def ok(self) -> bool:
        return not self.failures


def check_pi0_equivariance(
    split: Splitting,
    torus: TorusModel,
    alphas: Optional[Sequence[PlecticElement]] = None,
    points: Optional[Sequence[CMPoint]] = None,
) -> Pi0Outcome:
    """Verify that taking components commutes with the plectic action.

    Also verifies, per element, the embedding of the CM group into the
    component plectic group (the fiber condition for u = chi_F(P)), and,
    per Galois element, the multiplication rule through the cyclotomic
    class.  Returns all counterexamples instead of stopping at the first.
    """
    model = split.model
    out = Pi0Outcome()
    if alphas is None:
        alphas = cm_group_members(split, torus)
    if points is None:
        points = enumerate_cm_points(model, torus)

    for alpha in alphas:
        u = split.chi_f(product_map(alpha))
        try:
            lam = lambda_of(torus, u)
            fiber_ok = torus.mu(lam) == product_map(alpha)
        except DeltaOutsideModel:
            fiber_ok = False
        out.checked_embeddings += 1
        if not fiber_ok:
            out.failures.append({
                "kind": "embedding-fiber-condition",
                "alpha": alpha.describe(),
            })
            continue
        for point in points:
            moved = plectic_act_on_cm_point(split, torus, alpha, point)
            lhs = pi0_of_cm_point(torus, moved)
            rhs = pi0_plectic_action(torus, split, alpha, pi0_of_cm_point(torus, point))
            out.checked_pairs += 1
            if lhs != rhs:
                out.failures.append({
                    "kind": "pi0-equivariance",
                    "alpha": alpha.describe(),
                    "point": point.describe(),
                    "pi0_of_moved": list(lhs),
                    "moved_pi0": list(rhs),
                })

    G = model.cm.base.gamma
    zero_q = torus.p_r.zero()
    for g in G.elements():
        alpha = embed_galois(model.cm.base, g)
        try:
            via_plectic = pi0_plectic_action(torus, split, alpha, zero_q)
        except NotInPi0Group:
            via_plectic = None
        rule = pi0_galois_value(torus, g)
        out.checked_galois += 1
        if via_plectic != rule:
            out.failures.append({
                "kind": "galois-multiplication-rule",
                "gamma": G.name_of(g),
                "via_plectic": None if via_plectic is None else list(via_plectic),
                "cyclotomic_rule": list(rule),
            })
    return out
