"""
Transport of (Eq, Ω, Jp) on a universe p to (IdT, refl, J) on CC(C,p).

J is computed by solving its defining equation directly: φ∘Jp is decoded through η!
and ũ1⁻¹. The exhaustive search over sections of P is kept as an oracle for checks.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

from loguru import logger

from core.category.fincat import FINSET, Mor
from core.category.lcc import DpElement, eta, eta_bang
from core.csystem.cc_univ import UniverseCSystem
from core.csystem.csystem import Section
from core.csystem.jcs import (
    J0Structure,
    J1Structure,
    J2Structure,
    JBundleC,
    JdomEntry,
    check_iota,
    check_j0,
    check_j1,
    check_j2_naturality,
    idx_t,
    is_extensional,
    is_jdom_entry,
    jdom_enum,
    rf,
)
from core.exceptions import JStructureError
from core.universe.juniv import JUniverse, check_eq_shape
from core.universe.universe import UniverseCategory
from core.verification.report import CheckRecorder, CheckResult


@dataclass(frozen=True)
class PhiContext:
    """φ(Γ,T,P,s0): int(Γ) → Fp, paired from η_pE(F,G) and η_p(F,H̃)."""

    entry: JdomEntry
    F: Mor
    G: Mor
    H: Mor
    eta_e: Mor
    eta_p: Mor
    phi: Mor


def idt_from_eq(cc: UniverseCSystem, Eq: Mor) -> J0Structure:
    """IdT_Γ(o,o′) = u1⁻¹((ũ1(o)*ũ1(o′))∘Eq)."""
    universe = cc.universe
    if not check_eq_shape(universe, Eq):
        raise JStructureError(f"Eq must be a morphism (Ũ;p) → U, got {Eq!r}")

    def identity_type(gamma, o: Section, o2: Section):
        pair = universe.pair(universe.p, cc.u1_tilde(o), cc.u1_tilde(o2))
        return cc.u1_inv(gamma, pair.then(Eq))

    return J0Structure(cc, identity_type, name="IdT_Eq")


def refl_from_omega(cc: UniverseCSystem, Eq: Mor, Omega: Mor) -> J1Structure:
    """refl(s) = ũ1⁻¹(ũ1(s)∘Ω)."""
    universe = cc.universe
    if universe.delta().then(Eq) != Omega.then(universe.p):
        raise JStructureError("square Δ∘Eq = Ω∘p does not commute")

    def reflexivity(gamma, s: Section) -> Section:
        return cc.u1_tilde_inv(gamma, cc.u1_tilde(s).then(Omega))

    return J1Structure(cc, reflexivity, name="refl_Omega")


def phi_context(cc: UniverseCSystem, ju: JUniverse, entry: JdomEntry) -> PhiContext:
    F = cc.u1(entry.T)
    G = cc.u1(entry.P)
    H = cc.u1_tilde(entry.s0)
    eta_e = eta(ju.e, ju.lcc, DpElement(F, G), ju.universe.base)
    eta_p = eta(ju.universe, ju.lcc, DpElement(F, H), ju.universe.total)
    phi = ju.fp.fp.pair(eta_e, eta_p)
    return PhiContext(entry, F, G, H, eta_e, eta_p, phi)


def j_from_jp(cc: UniverseCSystem, ju: JUniverse, Jp: Mor, idt: J0Structure, refl: J1Structure) -> J2Structure:
    """J(Γ,T,P,s0) = ũ1⁻¹ of the second component of η!(φ(Γ,T,P,s0)∘Jp)."""
    if not ju.is_section_of_coj(Jp):
        raise JStructureError("Jp∘coJ is not the identity")

    def eliminator(entry: JdomEntry) -> Section:
        if not is_jdom_entry(cc, idt, refl, entry):
            raise JStructureError(f"{entry.describe()} is not in Jdom")
        context = phi_context(cc, ju, entry)
        decoded = eta_bang(ju.e, ju.lcc, context.phi.then(Jp), ju.universe.total)
        if decoded.F != context.F:
            raise JStructureError("η!(φ∘Jp) is not over u1(T)")
        section = cc.u1_tilde_inv(idx_t(cc, idt, entry.T), decoded.a)
        if section.target != entry.P:
            raise JStructureError("∂(J) differs from P")
        return section

    return J2Structure(cc, eliminator, name="J_Jp")


def transfer_bundle(cc: UniverseCSystem, ju: JUniverse, Jp: Optional[Mor] = None) -> JBundleC:
    idt = idt_from_eq(cc, ju.Eq)
    refl = refl_from_omega(cc, ju.Eq, ju.Omega)
    j = j_from_jp(cc, ju, Jp, idt, refl) if Jp is not None else None
    logger.debug(f"transferred (Eq, Ω{', Jp' if Jp is not None else ''}) to {cc.name}")
    return JBundleC(cc, idt, refl, j, name=f"J({cc.name})")


def defining_equation_holds(cc: UniverseCSystem, ju: JUniverse, Jp: Mor, entry: JdomEntry,
                            section: Section) -> bool:
    """η_pE(u1(T), ũ1(J)) = φ(Γ,T,P,s0)∘Jp."""
    context = phi_context(cc, ju, entry)
    lhs = eta(ju.e, ju.lcc, DpElement(context.F, cc.u1_tilde(section)), ju.universe.total)
    return lhs == context.phi.then(Jp)


def solutions_by_search(cc: UniverseCSystem, ju: JUniverse, Jp: Mor, entry: JdomEntry) -> List[Section]:
    return [s for s in cc.sections(entry.P) if defining_equation_holds(cc, ju, Jp, entry, s)]


def check_phi(cc: UniverseCSystem, ju: JUniverse, entries: Sequence[JdomEntry],
              max_instances: Optional[int] = None) -> CheckResult:
    """The two legs of φ agree over I_p(U) and η!(φ∘Jp) lies over u1(T)."""
    fp = ju.fp
    with CheckRecorder("2015.04.04.constr1", "φ(Γ,T,P,s0) is a cone into Fp", max_instances) as rec:
        for entry in entries:
            rec.instance()
            F = cc.u1(entry.T)
            eta_e = eta(ju.e, ju.lcc, DpElement(F, cc.u1(entry.P)), ju.universe.base)
            eta_p = eta(ju.universe, ju.lcc, DpElement(F, cc.u1_tilde(entry.s0)), ju.universe.total)
            rec.expect(eta_e.then(fp.i_omega_u) == eta_p.then(fp.i_p_p),
                       "η_pE(F,G)∘I^ω(U) differs from η_p(F,H̃)∘I_p(p)", entry=entry)
    return rec.result()


def check_j_defining_equation(cc: UniverseCSystem, ju: JUniverse, bundle: JBundleC, Jp: Mor,
                              entries: Sequence[JdomEntry], max_instances: Optional[int] = None) -> CheckResult:
    """J satisfies its defining equation and is the only section of P that does."""
    with CheckRecorder("2015.05.08.rem1", "J is the unique solution of its defining equation", max_instances) as rec:
        for entry in entries:
            rec.instance()
            value = bundle.j(entry)
            rec.expect(value.target == entry.P, "∂(J) differs from P", entry=entry)
            solutions = solutions_by_search(cc, ju, Jp, entry)
            rec.expect(solutions == [value], f"search found {len(solutions)} solutions, expected J alone",
                       entry=entry, J=value)
    return rec.result()


def check_idx_lemma(cc: UniverseCSystem, ju: JUniverse, idt: J0Structure, bound: int,
                    max_instances: Optional[int] = None) -> CheckResult:
    """int(IdxT(T)) = (int Γ;F)_E with p_(IdxT(T),3) = p^E_(Γ,F) and Q(F)_E∘Q(Eq) = Q(Q(Q(F),p)∘Eq)."""
    universe, e = ju.universe, ju.e
    with CheckRecorder("2015.03.27.l1", "IdxT(T) realizes the E-universe square", max_instances) as rec:
        for T in cc.objects(bound):
            if T.length == 0:
                continue
            rec.instance()
            F = cc.u1(T)
            X = idx_t(cc, idt, T)
            square = e.ext(F)
            qq = universe.q_of(universe.ext(F).q, universe.p)
            rec.expect(X.last == qq.then(ju.Eq), "last entry of IdxT(T) differs from Q(Q(F),p)∘Eq", object=T)
            if not rec.expect(cc.int_obj(X) == square.apex, "int(IdxT(T)) differs from (int Γ;F)_E", object=T):
                continue
            rec.expect(cc.proj_n(X, 3).mor == square.proj, "p_(IdxT(T),3) differs from p^E_(Γ,F)", object=T)
            rec.expect(square.q.then(e.second.q) == universe.ext(qq.then(ju.Eq)).q,
                       "Q(F)_E∘Q(Eq) differs from Q(Q(Q(F),p)∘Eq)", object=T)
    return rec.result()


def check_refl_lemma(cc: UniverseCSystem, ju: JUniverse, refl: J1Structure, bound: int,
                     max_instances: Optional[int] = None) -> CheckResult:
    """refl(s)∘Q(ũ1(s)∘Ω∘p) = ũ1(s)∘Ω."""
    universe, Omega = ju.universe, ju.Omega
    with CheckRecorder("2015.04.02.l3", "refl(s) composed with Q recovers ũ1(s)∘Ω", max_instances) as rec:
        for gamma in cc.objects(bound):
            for T in cc.extensions(gamma):
                for s in cc.sections(T):
                    rec.instance()
                    o_omega = cc.u1_tilde(s).then(Omega)
                    lhs = refl(gamma, s).mor.mor.then(universe.ext(o_omega.then(universe.p)).q)
                    rec.expect(lhs == o_omega, "refl(s)∘Q(s∘Q(F)∘Ω∘p) differs from s∘Q(F)∘Ω", s=s)
    return rec.result()


def check_rf_lemma(cc: UniverseCSystem, ju: JUniverse, idt: J0Structure, refl: J1Structure, bound: int,
                   max_instances: Optional[int] = None) -> CheckResult:
    """rf_T = F*(ω) as morphisms (int Γ;F) → (int Γ;F)_E."""
    with CheckRecorder("2015.03.31.l2", "rf_T = u1(T)*(ω)", max_instances) as rec:
        for T in cc.objects(bound):
            if T.length == 0:
                continue
            rec.instance()
            F = cc.u1(T)
            expected = ju.e.star(F, ju.omega, ju.universe)
            rec.expect(rf(cc, idt, refl, T).mor == expected, "rf_T differs from F*(ω)", object=T)
    return rec.result()


def check_q3_lemma(cc: UniverseCSystem, ju: JUniverse, idt: J0Structure, bound: int,
                   max_instances: Optional[int] = None) -> CheckResult:
    """q(f, IdxT(T), 3) = Q(f,F)_E for f: Γ′ → Γ."""
    with CheckRecorder("2015.04.04.l4", "triple q over IdxT(T) is Q(f,F)_E", max_instances) as rec:
        sources = cc.objects(max(bound - 1, 0))
        for T in cc.objects(bound):
            if T.length == 0:
                continue
            F = cc.u1(T)
            X = idx_t(cc, idt, T)
            for source in sources:
                for f in cc.hom(source, T.parent):
                    rec.instance()
                    rec.expect(cc.q_n(f, X, 3).mor == ju.e.q_of(f.mor, F), "q3 differs from Q(f,F)_E",
                               f=f, object=T)
    return rec.result()


def check_transfer(cc: UniverseCSystem, ju: JUniverse, bundle: JBundleC, bound: int, Jp: Optional[Mor] = None,
                   entries: Optional[Sequence[JdomEntry]] = None,
                   max_instances: Optional[int] = None) -> List[CheckResult]:
    """The transferred structures satisfy the J-structure definitions and every supporting lemma."""
    results = [check_j0(cc, bundle.idt, bound, max_instances=max_instances)]
    results.extend(check_j1(cc, bundle.idt, bundle.refl, bound, max_instances=max_instances))
    results.append(check_idx_lemma(cc, ju, bundle.idt, bound, max_instances))
    results.append(check_refl_lemma(cc, ju, bundle.refl, bound, max_instances))
    results.append(check_rf_lemma(cc, ju, bundle.idt, bundle.refl, bound, max_instances))
    results.append(check_q3_lemma(cc, ju, bundle.idt, bound, max_instances))
    if bundle.j is None or Jp is None:
        return results
    if entries is None:
        entries = jdom_enum(cc, bundle.idt, bundle.refl, bound)
    results.append(check_phi(cc, ju, entries, max_instances))
    results.append(check_iota(cc, bundle, entries, check_id="2015.04.04.l5", max_instances=max_instances))
    results.append(check_j2_naturality(cc, bundle, entries, bound, check_id="2015.04.04.l1",
                                       max_instances=max_instances))
    results.append(check_j_defining_equation(cc, ju, bundle, Jp, entries, max_instances))
    return results


def extensional_eqs(uc: UniverseCategory, bound: int = 1) -> List[Mor]:
    """Every Eq: (Ũ;p) → U whose IdT on CC(C,p) is extensional up to ``bound``."""
    universe = uc.universe
    cc = UniverseCSystem(universe)
    found = []
    for Eq in FINSET.hom(universe.ext(universe.p).apex, universe.base):
        if is_extensional(cc, idt_from_eq(cc, Eq), bound):
            found.append(Eq)
    logger.debug(f"{len(found)} extensional Eq on {universe.name}")
    return found


def expected_extensional_count(uc: UniverseCategory) -> int:
    """One-element codes on the diagonal of (Ũ;p), empty codes off it."""
    sizes = [len(uc.p.fiber(code)) for code in uc.base.elements]
    ones, zeros = sizes.count(1), sizes.count(0)
    square = uc.universe.ext(uc.p)
    diagonal = sum(1 for w in square.apex.elements if square.proj(w) == square.q(w))
    return ones ** diagonal * zeros ** (len(square.apex) - diagonal)


def check_extensional_eq_unique(uc: UniverseCategory, bound: int = 1, Eq: Optional[Mor] = None,
                                max_instances: Optional[int] = None) -> CheckResult:
    """
    The Eq with extensional IdT are exactly the code-wise ones; with a single one-element
    code and a single empty code there is exactly one, and it is ``Eq``.
    """
    with CheckRecorder("2015.05.12.rem1.eq", "extensional IdT determines Eq", max_instances) as rec:
        rec.instance()
        found = extensional_eqs(uc, bound)
        expected = expected_extensional_count(uc)
        rec.note(f"{len(found)} extensional Eq at bound {bound}")
        rec.expect(len(found) == expected, f"found {len(found)} Eq with extensional IdT, expected {expected}")
        if Eq is not None:
            rec.expect(Eq in found, "the fixture's Eq does not give an extensional IdT", Eq=Eq)
            if expected == 1:
                rec.expect(found == [Eq], "the extensional Eq is not the fixture's Eq", candidates=found)
    return rec.result()
