"""Verification suites and structured reports.

Each suite runs the exhaustive desk-scale checks for one slice of the
theory on one model.  Checks that need an axiom flag the model does not
have are skipped with the flag named; a skip is never a pass.  The same
functions back the command-line interface and the acceptance tests.
"""

from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .abelian import AbHom, span
from .actions import (
    CMPoint,
    TorusModel,
    check_pi0_equivariance,
    cm_group_members,
    enumerate_cm_points,
    galois_act_on_cm_point,
    pi0_galois_value,
    pi0_of_cm_point,
    pi0_plectic_action,
    plectic_act_on_cm_point,
)
from .cm import (
    CMType,
    act_on_cm_type,
    act_on_sigma_k,
    act_on_sigma_k_via_map,
    complex_conjugations,
    conjugation_flip_vector,
    enumerate_cm_types,
    enumerate_equivariant_sections,
    half_transfer,
    orbit_decomposition,
    tate_half_transfer,
)
from .config import ModelBundle
from .errors import NotInPi0Group, NotSplit, PlecticError, SignViolation
from .groups import transfer
from .plectic import (
    PlecticElement,
    as_map_on_gamma,
    compose,
    embed_galois,
    enumerate_plectic_group,
    identity_element,
    inverse,
    product_map,
    rebase,
)
from .recip import (
    Splitting,
    enumerate_splittings,
    make_splitting,
    membership_cm_group,
    taniyama,
    taniyama_galois,
    transfer_image_predicate,
)

REPORT_SCHEMA_VERSION = 1
SUITES = ("prodmap", "halftransfer", "taniyama", "cmaction", "pi0")


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str = ""
    counterexample: Optional[dict] = None

    def as_dict(self) -> dict:
        out = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class Report:
    command: str
    model: str
    chi_fingerprint: Optional[str] = None
    flags: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    timing_s: float = 0.0

    def add(self, name: str, ok: bool, detail: str = "",
            counterexample: Optional[dict] = None) -> None:
        self.checks.append(CheckResult(
            name, "pass" if ok else "fail", detail, counterexample))

    def skip(self, name: str, flag: str, detail: str = "") -> None:
        text = f"skipped: {detail or 'prerequisite not met'} (flag: {flag})"
        self.checks.append(CheckResult(name, "skip", text))

    @property
    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.counts["fail"] == 0

    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def as_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": self.command,
            "model": self.model,
            "chi_fingerprint": self.chi_fingerprint,
            "flags": self.flags,
            "counts": self.counts,
            "checks": [c.as_dict() for c in self.checks],
            "extra": self.extra,
            "timing_s": round(self.timing_s, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        lines = []
        chi = f"  chi_F={self.chi_fingerprint}" if self.chi_fingerprint else ""
        lines.append(f"== {self.command} on model {self.model}{chi}")
        if self.flags:
            lines.append("   flags: " + ", ".join(
                f"{k}={'on' if v else 'off'}" for k, v in sorted(self.flags.items())))
        width = max((len(c.name) for c in self.checks), default=10)
        for c in self.checks:
            mark = {"pass": "PASS", "fail": "FAIL", "skip": "skip"}[c.status]
            detail = f"  {c.detail}" if c.detail else ""
            lines.append(f"   [{mark}] {c.name.ljust(width)}{detail}")
        counts = self.counts
        lines.append(
            f"   {counts['pass']} passed, {counts['fail']} failed, "
            f"{counts['skip']} skipped in {self.timing_s:.2f}s")
        return "\n".join(lines)


def _splitting_or_none(bundle: ModelBundle) -> Optional[Splitting]:
    try:
        return make_splitting(bundle.recip)
    except (NotSplit, PlecticError):
        return None


def _new_report(bundle: ModelBundle, command: str,
                split: Optional[Splitting]) -> Report:
    return Report(
        command=command,
        model=bundle.id,
        chi_fingerprint=split.fingerprint() if split else None,
        flags=bundle.recip.flags.as_dict(),
    )


# ---------------------------------------------------------------------------
# prodmap suite
# ---------------------------------------------------------------------------

def run_prodmap(bundle: ModelBundle, report: Report) -> None:
    ctx = bundle.context
    G = ctx.gamma
    group = enumerate_plectic_group(ctx)
    ident = identity_element(ctx)

    bad = None
    for a in group:
        if compose(a, inverse(a)) != ident or compose(ident, a) != a:
            bad = {"alpha": a.describe()}
            break
    full_triples = len(group) ** 3 <= 200_000
    if bad is None:
        outer = group if full_triples else group[:: max(1, len(group) // 16)]
        for a in outer:
            for b in group:
                for c in outer:
                    if compose(compose(a, b), c) != compose(a, compose(b, c)):
                        bad = {"alpha": a.describe(), "beta": b.describe(),
                               "gamma": c.describe()}
                        break
    report.add("plectic-group-axioms", bad is None,
               f"order {len(group)}; identity, inverses, associativity "
               f"({'all' if full_triples else 'sampled'} triples)",
               counterexample=bad)

    bad = None
    outer = 0
    for a in group:
        base = product_map(a)
        for section in ctx.all_sections():
            outer += 1
            t = ctx.section_shift(section)
            if product_map(rebase(a, t)) != base:
                bad = {"alpha": a.describe(), "section": [G.name_of(s) for s in section]}
                break
        if bad:
            break
    report.add("product-map-section-independence", bad is None,
               f"{len(group)} elements x {ctx.h_f.order ** ctx.degree} sections",
               counterexample=bad)

    bad = None
    for g in G.elements():
        if product_map(embed_galois(ctx, g)) != transfer(G, ctx.h_f, g, ab=ctx.h_f_ab):
            bad = {"gamma": G.name_of(g)}
            break
    report.add("product-map-transfer-identity", bad is None,
               "P(embed(gamma)) equals the transfer for every gamma", counterexample=bad)

    if G.is_abelian():
        r = ctx.degree
        bad = None
        for g in G.elements():
            if transfer(G, ctx.h_f, g, ab=ctx.h_f_ab) != ctx.h_f_ab.project(G.power(g, r)):
                bad = {"gamma": G.name_of(g)}
                break
        report.add("transfer-power-oracle", bad is None,
                   f"transfer equals projection of gamma^{r} (abelian group)",
                   counterexample=bad)
    else:
        report.add("transfer-power-oracle", True, "not applicable: group is nonabelian")

    bad = None
    ab = ctx.h_f_ab
    for g in G.elements():
        for g2 in G.elements():
            lhs = transfer(G, ctx.h_f, G.mul(g, g2), ab=ab)
            rhs = ab.group.add(transfer(G, ctx.h_f, g, ab=ab), transfer(G, ctx.h_f, g2, ab=ab))
            if lhs != rhs:
                bad = {"gamma": G.name_of(g), "gamma2": G.name_of(g2)}
                break
        if bad:
            break
    report.add("transfer-homomorphism", bad is None,
               f"all {G.order}^2 pairs", counterexample=bad)


# ---------------------------------------------------------------------------
# halftransfer suite
# ---------------------------------------------------------------------------

def _half_transfer_table(bundle: ModelBundle):
    cm = bundle.cm
    group = enumerate_plectic_group(bundle.context)
    types = enumerate_cm_types(cm)
    table = {}
    for a in group:
        for t in types:
            table[(a.key(), t.phi)] = half_transfer(cm, a, t)
    return group, types, table


def run_halftransfer(bundle: ModelBundle, report: Report) -> None:
    cm = bundle.cm
    G = bundle.context.gamma
    group, types, table = _half_transfer_table(bundle)
    ab = cm.h_k_ab.group

    bad = None
    pairs = 0
    for a in group:
        for b in group:
            ab_el = compose(a, b)
            for t in types:
                pairs += 1
                lhs = table[(ab_el.key(), t.phi)]
                rhs = ab.add(table[(a.key(), act_on_cm_type(cm, b, t).phi)],
                             table[(b.key(), t.phi)])
                if lhs != rhs:
                    bad = {"alpha": a.describe(), "alpha2": b.describe(),
                           "phi": t.describe()}
                    break
            if bad:
                break
        if bad:
            break
    report.add("halftransfer-cocycle", bad is None,
               f"{len(group)}^2 pairs x {len(types)} CM types", counterexample=bad)

    sections = enumerate_equivariant_sections(cm)
    bad = None
    for w in sections:
        for a in group:
            for t in types:
                if half_transfer(cm, a, t, w) != table[(a.key(), t.phi)]:
                    bad = {"alpha": a.describe(), "phi": t.describe(),
                           "w": [G.name_of(x) for x in w.w]}
                    break
            if bad:
                break
        if bad:
            break
    report.add("halftransfer-w-independence", bad is None,
               f"{len(sections)} equivariant sections", counterexample=bad)

    res = cm.restriction_to_f()
    cx, _ = complex_conjugations(cm)
    afg = cm.h_f_ab.group
    bad = None
    for a in group:
        for t in types:
            flips = conjugation_flip_vector(cm, t, act_on_cm_type(cm, a, t))
            rhs = product_map(a)
            for x, m in enumerate(flips):
                if m:
                    rhs = afg.add(rhs, cx[x])
            if res(table[(a.key(), t.phi)]) != rhs:
                bad = {"alpha": a.describe(), "phi": t.describe()}
                break
        if bad:
            break
    report.add("halftransfer-restriction-formula", bad is None,
               "restriction equals product map times conjugation flips",
               counterexample=bad)

    bad = None
    for a in group:
        for rho in range(cm.sigma_k.index):
            if act_on_sigma_k(cm, a, rho) != act_on_sigma_k_via_map(cm, a, rho):
                bad = {"alpha": a.describe(), "rho": cm.coset_label(rho)}
                break
        if bad:
            break
    report.add("halftransfer-action-coset-oracle", bad is None,
               "index formula equals the coset action", counterexample=bad)

    bad = None
    for g in G.elements():
        a = embed_galois(bundle.context, g)
        for t in types:
            if table[(a.key(), t.phi)] != tate_half_transfer(cm, g, t):
                bad = {"gamma": G.name_of(g), "phi": t.describe()}
                break
        if bad:
            break
    report.add("halftransfer-galois-tate", bad is None,
               "plectic value at embeddings equals the classical formula",
               counterexample=bad)


# ---------------------------------------------------------------------------
# taniyama suite
# ---------------------------------------------------------------------------

def run_taniyama(bundle: ModelBundle, report: Report,
                 split: Optional[Splitting]) -> None:
    model = bundle.recip
    names = ("taniyama-exists-unique", "taniyama-galois-oracle",
             "taniyama-twisted-homomorphism")
    if split is None:
        for n in names:
            report.skip(n, "splitting", "rec_F admits no admissible splitting")
        return
    if not model.flags.top_cartesian:
        for n in names:
            report.skip(n, "top_cartesian", "top square not Cartesian")
        return

    cm = bundle.cm
    G = bundle.context.gamma
    group = enumerate_plectic_group(bundle.context)
    types = enumerate_cm_types(cm)

    bad = None
    values = {}
    try:
        for a in group:
            for t in types:
                values[(a.key(), t.phi)] = taniyama(split, a, t)
    except PlecticError as exc:
        bad = {"error": str(exc)}
    report.add("taniyama-exists-unique", bad is None,
               f"{len(group)} elements x {len(types)} types, unique lift each",
               counterexample=bad)
    if bad:
        return

    bad = None
    kernel_orders = set()
    for g in G.elements():
        a = embed_galois(bundle.context, g)
        for t in types:
            oracle = taniyama_galois(split, g, t)
            kernel_orders.add(oracle.kernel_order)
            plectic_val = values[(a.key(), t.phi)]
            if oracle.unique:
                if plectic_val != oracle.f:
                    bad = {"gamma": G.name_of(g), "phi": t.describe(),
                           "plectic": list(plectic_val), "classical": list(oracle.f)}
                    break
            else:
                joint = model.i_kf.compose(model.n_kf)
                cond = (model.rec_k(plectic_val) == model.rec_k(oracle.f)
                        and joint(plectic_val) == joint(oracle.f))
                if not cond:
                    bad = {"gamma": G.name_of(g), "phi": t.describe()}
                    break
        if bad:
            break
    unique_note = ("unique" if kernel_orders == {1}
                   else f"classical lift determined up to kernel of order {max(kernel_orders)}")
    report.add("taniyama-galois-oracle", bad is None,
               f"matches the (1+c)/cyclotomic characterization; {unique_note}",
               counterexample=bad)

    bad = None
    for a in group:
        for b in group:
            ab_el = compose(a, b)
            for t in types:
                lhs = values[(ab_el.key(), t.phi)]
                rhs = model.i_k.add(values[(a.key(), act_on_cm_type(cm, b, t).phi)],
                                    values[(b.key(), t.phi)])
                if lhs != rhs:
                    bad = {"alpha": a.describe(), "alpha2": b.describe(),
                           "phi": t.describe()}
                    break
            if bad:
                break
        if bad:
            break
    report.add("taniyama-twisted-homomorphism", bad is None,
               "f(ab) = f_{b phi}(a) f_phi(b) for all pairs and types",
               counterexample=bad)


# ---------------------------------------------------------------------------
# cmaction suite
# ---------------------------------------------------------------------------

def _memoized_action(split: Splitting, torus: TorusModel):
    """Single-step plectic action with memoization over (element, point)."""
    cache: dict = {}

    def key_of(p: CMPoint):
        return (p.phi, p.a, p.delta, p.e)

    def act(a: PlecticElement, p: CMPoint) -> CMPoint:
        k = (a.key(), key_of(p))
        if k not in cache:
            cache[k] = plectic_act_on_cm_point(split, torus, a, p)
        return cache[k]

    return act


def run_cmaction(bundle: ModelBundle, report: Report,
                 split: Optional[Splitting]) -> None:
    model = bundle.recip
    if split is None:
        report.skip("cmaction", "splitting", "rec_F admits no admissible splitting")
        return
    group = enumerate_plectic_group(bundle.context)
    G = bundle.context.gamma
    cyclo_members = span(
        model.i_f, [model.i_fq(model.chi_cyc(g)) for g in model.a_q.generators()])

    for name, torus in bundle.tori.items():
        members = cm_group_members(split, torus)
        tag = f"[{name}]"

        bad = None
        member_set = {m.key() for m in members}
        for a in members:
            if inverse(a).key() not in member_set:
                bad = {"alpha": a.describe(), "reason": "inverse escapes"}
                break
            for b in members:
                if compose(a, b).key() not in member_set:
                    bad = {"alpha": a.describe(), "alpha2": b.describe()}
                    break
            if bad:
                break
        report.add(f"cmaction-membership-closure{tag}", bad is None,
                   f"{len(members)} of {len(group)} elements form a subgroup",
                   counterexample=bad)

        if len(torus.i_r_members) == model.i_f.order:
            report.add(f"cmaction-full-torus-everything{tag}",
                       len(members) == len(group),
                       "membership is constantly true on the full torus")
        if torus.i_r_members == cyclo_members:
            bad = None
            for a in group:
                if membership_cm_group(split, torus.i_r_members, a) != \
                        transfer_image_predicate(model, a):
                    bad = {"alpha": a.describe()}
                    break
            report.add(f"cmaction-minimal-transfer-image{tag}", bad is None,
                       "membership coincides with the transfer-image predicate",
                       counterexample=bad)

        if not model.flags.top_cartesian:
            for n in ("group-law", "extends-galois", "sign-condition"):
                report.skip(f"cmaction-{n}{tag}", "top_cartesian",
                            "top square not Cartesian")
            continue

        points = enumerate_cm_points(model, torus)
        act = _memoized_action(split, torus)
        sign_violation = None
        try:
            for a in members:
                for p in points:
                    act(a, p)
        except SignViolation as exc:
            sign_violation = str(exc)
        report.add(f"cmaction-sign-condition{tag}", sign_violation is None,
                   f"{len(members)} members x {len(points)} points twist within "
                   "the predicted sign class",
                   counterexample=None if sign_violation is None else
                   {"error": sign_violation})
        if sign_violation is not None:
            continue

        bad = None
        for a in members:
            for b in members:
                ab_el = compose(a, b)
                for p in points:
                    if act(ab_el, p) != act(a, act(b, p)):
                        bad = {"alpha": a.describe(), "alpha2": b.describe(),
                               "point": p.describe()}
                        break
                if bad:
                    break
            if bad:
                break
        report.add(f"cmaction-group-law{tag}", bad is None,
                   f"{len(members)}^2 pairs x {len(points)} points",
                   counterexample=bad)

        bad = None
        for g in G.elements():
            a = embed_galois(bundle.context, g)
            for p in points:
                if act(a, p) != galois_act_on_cm_point(split, g, p):
                    bad = {"gamma": G.name_of(g), "point": p.describe()}
                    break
            if bad:
                break
        report.add(f"cmaction-extends-galois{tag}", bad is None,
                   "plectic action at embeddings equals the Galois conjugation",
                   counterexample=bad)


# ---------------------------------------------------------------------------
# pi0 suite
# ---------------------------------------------------------------------------

def run_pi0(bundle: ModelBundle, report: Report,
            split: Optional[Splitting]) -> None:
    model = bundle.recip
    if split is None:
        report.skip("pi0", "splitting", "rec_F admits no admissible splitting")
        return
    G = bundle.context.gamma

    for name, torus in bundle.tori.items():
        tag = f"[{name}]"

        bad = None
        zero_q = torus.p_r.zero()
        for g in G.elements():
            a = embed_galois(bundle.context, g)
            try:
                via = pi0_plectic_action(torus, split, a, zero_q)
            except NotInPi0Group as exc:
                bad = {"gamma": G.name_of(g), "error": str(exc)}
                break
            if via != pi0_galois_value(torus, g):
                bad = {"gamma": G.name_of(g), "via_plectic": list(via),
                       "cyclotomic_rule": list(pi0_galois_value(torus, g))}
                break
        report.add(f"pi0-galois-rule{tag}", bad is None,
                   "action of embeddings is multiplication by the cyclotomic class",
                   counterexample=bad)

        members = cm_group_members(split, torus)
        bad = None
        for a in members:
            u = split.chi_f(product_map(a))
            try:
                lam = torus.class_component(u)
            except PlecticError as exc:
                bad = {"alpha": a.describe(), "error": str(exc)}
                break
            if torus.mu(lam) != product_map(a):
                bad = {"alpha": a.describe()}
                break
        report.add(f"pi0-embedding-fiber{tag}", bad is None,
                   f"all {len(members)} CM-group members satisfy the component "
                   "fiber condition", counterexample=bad)

        if not model.flags.top_cartesian:
            report.skip(f"pi0-equivariance{tag}", "top_cartesian",
                        "top square not Cartesian")
            report.skip(f"pi0-mutation{tag}", "top_cartesian",
                        "top square not Cartesian")
            continue

        outcome = check_pi0_equivariance(split, torus)
        report.add(f"pi0-equivariance{tag}", outcome.ok,
                   f"{outcome.checked_pairs} (element, point) pairs, "
                   f"{outcome.checked_embeddings} embeddings, "
                   f"{outcome.checked_galois} Galois elements",
                   counterexample=outcome.failures[0] if outcome.failures else None)

        corrupted_mu = copy.copy(torus)
        corrupted_mu.mu = AbHom.zero(torus.p_r, model.a_f)
        broken_mu = not check_pi0_equivariance(split, corrupted_mu).ok
        corrupted_quot = copy.copy(torus)
        corrupted_quot.quot = AbHom.zero(torus._ambient, torus.p_r)
        broken_quot = not check_pi0_equivariance(split, corrupted_quot).ok
        report.add(f"pi0-mutation{tag}", broken_mu and broken_quot,
                   "corrupting the component maps is caught with a counterexample")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(bundle: ModelBundle, suites: Sequence[str] = SUITES) -> Report:
    split = _splitting_or_none(bundle)
    report = _new_report(bundle, f"verify --suite {','.join(suites)}", split)
    started = time.perf_counter()
    for suite in suites:
        if suite == "prodmap":
            run_prodmap(bundle, report)
        elif suite == "halftransfer":
            run_halftransfer(bundle, report)
        elif suite == "taniyama":
            run_taniyama(bundle, report, split)
        elif suite == "cmaction":
            run_cmaction(bundle, report, split)
        elif suite == "pi0":
            run_pi0(bundle, report, split)
        else:
            raise ValueError(f"unknown suite {suite!r} (choose from {SUITES})")
    report.timing_s = time.perf_counter() - started
    return report


def cmd_orbits(bundle: ModelBundle, which: str = "both") -> Report:
    split = _splitting_or_none(bundle)
    report = _new_report(bundle, f"orbits --group {which}", split)
    started = time.perf_counter()
    selectors = {"galois": ["galois"], "plectic": ["full-plectic"],
                 "both": ["galois", "full-plectic"]}
    if which not in selectors:
        raise ValueError("orbit group must be galois, plectic or both")
    tables = {}
    for selector in selectors[which]:
        orbits = orbit_decomposition(bundle.cm, selector)
        label = "galois" if selector == "galois" else "plectic"
        tables[label] = [
            {"size": o.size, "representative": o.representative.describe(),
             "members": [t.describe() for t in o.members]}
            for o in orbits
        ]
        sizes = sorted((o.size for o in orbits), reverse=True)
        report.add(f"orbits-{label}", True,
                   f"{len(orbits)} orbit(s) of sizes {sizes}")
    report.extra["orbits"] = tables
    report.timing_s = time.perf_counter() - started
    return report


def cmd_chi_dependence(bundle: ModelBundle) -> Report:
    model = bundle.recip
    splittings = enumerate_splittings(model)
    if not splittings:
        raise NotSplit(f"rec_F of model {bundle.id!r} admits no admissible splitting")
    report = _new_report(bundle, "chi-dependence", splittings[0])
    started = time.perf_counter()
    report.add("chi-count", True, f"{len(splittings)} admissible splitting(s)")

    group = enumerate_plectic_group(bundle.context)
    types = enumerate_cm_types(bundle.cm)

    taniyama_tables = {}
    if model.flags.top_cartesian:
        for sp in splittings:
            entries = {}
            for a in group:
                for t in types:
                    val = taniyama(sp, a, t)
                    entries[f"{a.describe()['pi']}|{a.describe()['h']}|{t.describe()}"] = list(val)
            taniyama_tables[sp.fingerprint()] = entries
        distinct = len({json.dumps(v, sort_keys=True) for v in taniyama_tables.values()})
        report.add("taniyama-per-chi", True,
                   f"values vary across splittings: {distinct > 1}"
                   if len(splittings) > 1 else "single splitting, nothing to compare")
    else:
        report.skip("taniyama-per-chi", "top_cartesian", "top square not Cartesian")
    report.extra["taniyama_per_chi"] = taniyama_tables

    membership_sets = {}
    lambda_tables = {}
    orbit_digests = {}
    for sp in splittings:
        fp = sp.fingerprint()
        membership_sets[fp] = {}
        lambda_tables[fp] = {}
        orbit_digests[fp] = {}
        for name, torus in bundle.tori.items():
            members = cm_group_members(sp, torus)
            membership_sets[fp][name] = sorted(str(m.key()) for m in members)
            lambda_tables[fp][name] = {
                str(m.key()): list(torus.class_component(sp.chi_f(product_map(m))))
                for m in members
            }
            if model.flags.top_cartesian:
                try:
                    points = enumerate_cm_points(model, torus)
                    digest = _point_orbit_digest(sp, torus, members, points)
                except SignViolation as exc:
                    digest = {"sign_violation": str(exc)}
                orbit_digests[fp][name] = digest

    for name in bundle.tori:
        same_members = len({json.dumps(membership_sets[fp][name]) for fp in membership_sets}) == 1
        report.add(f"membership-compared[{name}]", True,
                   "identical across splittings" if same_members
                   else "membership depends on the splitting (reported, not judged)")
        fps = list(lambda_tables)
        invariant = True
        for key in set().union(*(set(lambda_tables[fp][name]) for fp in fps)):
            vals = {json.dumps(lambda_tables[fp][name].get(key)) for fp in fps
                    if key in lambda_tables[fp][name]}
            if len(vals) > 1:
                invariant = False
                break
        report.add(f"pi0-action-invariant[{name}]", invariant,
                   "component action is bitwise identical across splittings")

    report.extra["membership_per_chi"] = membership_sets
    report.extra["pi0_action_per_chi"] = lambda_tables
    report.extra["cm_orbits_per_chi"] = orbit_digests
    report.timing_s = time.perf_counter() - started
    return report


def _point_orbit_digest(split: Splitting, torus: TorusModel,
                        members: Sequence[PlecticElement],
                        points: Sequence[CMPoint]) -> dict:
    def key_of(p: CMPoint):
        return (tuple(sorted(p.phi.phi)), p.a, p.delta, p.e)

    index = {key_of(p): p for p in points}
    seen = set()
    sizes = []
    for p in points:
        k = key_of(p)
        if k in seen:
            continue
        orbit = {k}
        frontier = [p]
        while frontier:
            nxt = []
            for q in frontier:
                for m in members:
                    moved = plectic_act_on_cm_point(split, torus, m, q)
                    mk = key_of(moved)
                    if mk not in orbit:
                        orbit.add(mk)
                        nxt.append(moved)
            frontier = nxt
        seen |= orbit
        sizes.append(len(orbit))
    return {"orbit_sizes": sorted(sizes, reverse=True),
            "points_inside_seed_set": len(seen & set(index)),
            "points_total_reached": len(seen)}
