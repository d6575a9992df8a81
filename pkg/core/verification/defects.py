"""
Defect injection: deliberately broken structures and the anchor each one must trip.

Every defect builds its broken variant from the verification context, runs the check
that guards the anchor and returns the check results. The negative suite passes when
the anchor fails.
"""
import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Dict, List

from loguru import logger

from core.category.fincat import (
    FINSET,
    Arrow,
    FinSet,
    FunctorData,
    Mor,
    TableCategory,
    check_category_axioms,
    check_functor,
)
from core.csystem.csystem import CorruptedCSystem, CSystemHomomorphism, check_csystem_axioms
from core.csystem.jcs import JBundleC, check_hom_j, check_iota, jdom_enum, rf
from core.exceptions import FixtureError
from core.universe.functors import JFunctorData, UnivCatFunctor, check_h_j_compat, check_structure
from core.universe.juniv import JUniverse, UnivJBundle, check_univ_j, sq1_commutes
from core.universe.lifting import CLASS_PAIRS, TH1, check_conditions, check_derive_j
from core.universe.universe import CanonicalSquare, EUniverse, check_e_universe
from core.verification.report import CheckResult

if TYPE_CHECKING:
    from core.verification.suites import SuiteOptions, VerificationContext


@dataclass(frozen=True)
class Defect:
    name: str
    anchor: str
    description: str
    run: Callable[["VerificationContext", "SuiteOptions"], List[CheckResult]]


def _z3_with_bad_square() -> TableCategory:
    """Z/3 on one object with a+a sent to e instead of b."""
    names = ["e", "a", "b"]
    composition = {(names[i], names[j]): names[(i + j) % 3] for i in range(3) for j in range(3)}
    composition[("a", "a")] = "e"
    return TableCategory(["*"], [Arrow(n, "*", "*") for n in names], composition, {"*": "e"})


def composition_table(ctx, options) -> List[CheckResult]:
    return [check_category_axioms(_z3_with_bad_square(), max_instances=options.max_instances)]


def functor_image(ctx, options) -> List[CheckResult]:
    two = FinSet.skeletal(2)
    victim = Mor(two, two, (0, 0))
    functor = FunctorData(
        FINSET, FINSET, lambda x: x, lambda f: Mor.identity(two) if f == victim else f, name="Id with one wrong image"
    )
    return [check_functor(functor, bound=4, max_instances=options.max_instances)]


def corrupted_ft(ctx, options) -> List[CheckResult]:
    cc = ctx.cc
    layer = cc.objects_of_length(1)
    for victim in cc.objects_of_length(2):
        wrong = next((gamma for gamma in layer if gamma != victim.parent), None)
        if wrong is not None:
            corrupted = CorruptedCSystem(cc, victim, wrong)
            return [check_csystem_axioms(corrupted, 2, max_instances=options.max_instances)]
    raise FixtureError(f"{ctx.name}: no object of length 2 with a second candidate parent")


def _tweaked_bundle(ctx, options) -> JBundleC:
    cc, bundle = ctx.cc, ctx.bundle
    for entry in jdom_enum(cc, bundle.idt, bundle.refl, options.bound):
        r = rf(cc, bundle.idt, bundle.refl, entry.T)
        for s in cc.sections(entry.P):
            if cc.pullback_section(r, s, 1) != entry.s0:
                logger.debug(f"J overridden at {entry.gamma!r}")
                return bundle.with_j(bundle.j.with_override(entry, s))
    raise FixtureError(f"{ctx.name}: no Jdom entry admits a section violating the ι-rule")


def j_tweak(ctx, options) -> List[CheckResult]:
    tweaked = _tweaked_bundle(ctx, options)
    entries = jdom_enum(ctx.cc, tweaked.idt, tweaked.refl, options.bound)
    return [check_iota(ctx.cc, tweaked, entries, check_id="2015.04.04.l5", max_instances=options.max_instances)]


def hom_mismatch(ctx, options) -> List[CheckResult]:
    tweaked = _tweaked_bundle(ctx, options)
    h = CSystemHomomorphism.identity(ctx.cc)
    return check_hom_j(h, ctx.bundle, tweaked, options.bound, max_instances=options.max_instances)


def omega_sq1(ctx, options) -> List[CheckResult]:
    fixture = ctx.fixture
    universe, Eq = fixture.uc.universe, fixture.ju.Eq
    candidates = [Mor.identity(universe.total)] + [
        Mor.constant(universe.total, universe.total, u) for u in universe.total.elements
    ]
    for Omega in candidates:
        if not sq1_commutes(universe, Eq, Omega):
            return check_univ_j(fixture.ju, UnivJBundle(Eq, Omega), options.max_instances)[1:2]
    raise FixtureError(f"{ctx.name}: every candidate Ω satisfies Δ∘Eq = Ω∘p")


def jp_permuted(ctx, options) -> List[CheckResult]:
    ju, Jp = ctx.fixture.ju, ctx.fixture.bundle.Jp
    fp = ju.fp
    over = fp.i_pe_utilde.proj
    table = Jp.as_dict()
    for y, x in table.items():
        for other in over.fiber(over(x)):
            if fp.coJ(other) != y:
                table[y] = other
                broken = Mor.from_mapping(Jp.dom, Jp.cod, table)
                return check_univ_j(ju, ctx.fixture.bundle.with_jp(broken), options.max_instances)[2:3]
    raise FixtureError(f"{ctx.name}: every fiber of I_pE(Ũ) maps onto a single element of Fp")


def _wide_code(ctx) -> str:
    uc = ctx.fixture.uc
    for code in uc.base.elements:
        if len(uc.p.fiber(code)) >= 2:
            return code
    raise FixtureError(f"{ctx.name}: no fiber with two elements")


def phi_tilde_collapse(ctx, options) -> List[CheckResult]:
    uc = ctx.fixture.uc
    code = _wide_code(ctx)
    first, second = uc.p.fiber(code)[:2]
    phi_tilde = Mor.from_function(uc.total, uc.total, lambda u: first if u == second else u)
    functor = UnivCatFunctor.between(uc, uc, Mor.identity(uc.base), phi_tilde, name="Φ with a collapsed fiber")
    return [r for r in check_structure(functor, 1, options.max_instances) if r.check_id == "2015.04.06.eq10"]


def omega_incompatible(ctx, options) -> List[CheckResult]:
    """Identity Φ between two J-universes sharing a constant Eq but with different constant Ω."""
    uc = ctx.fixture.uc
    code = _wide_code(ctx)
    first, second = uc.p.fiber(code)[:2]
    Eq = Mor.constant(uc.universe.ext(uc.p).apex, uc.base, code)
    source = JUniverse(uc, Eq, Mor.constant(uc.total, uc.total, first))
    target = JUniverse(uc, Eq, Mor.constant(uc.total, uc.total, second))
    functor = UnivCatFunctor.between(uc, uc, Mor.identity(uc.base), Mor.identity(uc.total), name="Id")
    return check_h_j_compat(JFunctorData(functor, source, target), options.bound, max_instances=options.max_instances)


class SwappedEUniverse(EUniverse):
    """E-universe whose chosen Q(F)_E swaps the images of two elements over the same point."""

    def _choose(self, F: Mor) -> CanonicalSquare:
        square = super()._choose(F)
        for z1, z2 in itertools.combinations(square.apex, 2):
            if square.proj(z1) == square.proj(z2) and square.q(z1) != square.q(z2):
                swap = {z1: square.q(z2), z2: square.q(z1)}
                q = Mor.from_function(square.apex, self.total, lambda z: swap.get(z, square.q(z)))
                return CanonicalSquare(F, square.apex, q, square.proj, self.p)
        return square


def e_square_swap(ctx, options) -> List[CheckResult]:
    e = ctx.fixture.ju.e
    if all(len(e.p.fiber(code)) < 2 for code in e.base):
        raise FixtureError(f"{ctx.name}: every fiber of pEŨ has at most one element")
    broken = SwappedEUniverse(e.base_universe, e.Eq)
    return [check_e_universe(broken, [broken.base], options.max_instances)]


def cond2_inj_all(ctx, options) -> List[CheckResult]:
    bound = min(options.lifting_bound, 2)
    return [check_conditions(CLASS_PAIRS["inj-all"], "cond2", bound, ctx.fixture.uc.lcc)]


def derive_hypothesis(ctx, options) -> List[CheckResult]:
    fixture = ctx.fixture
    if fixture.uc.p.is_surjective():
        raise FixtureError(f"{ctx.name}: p is surjective")
    return check_derive_j(fixture.uc, fixture.ju.Eq, fixture.ju.Omega, CLASS_PAIRS["inj-surj"], TH1,
                          min(options.lifting_bound, 2))[:1]


DEFECTS: Dict[str, Defect] = {
    defect.name: defect
    for defect in [
        Defect("composition-table", "fincat.axioms", "Z/3 with one corrupted composition entry", composition_table),
        Defect("functor-image", "fincat.functor", "identity functor with one wrong morphism image", functor_image),
        Defect("corrupted-ft", "csystem.axioms", "CC with ft of one object redirected", corrupted_ft),
        Defect("j-tweak", "2015.04.04.l5", "J overridden at one Jdom entry", j_tweak),
        Defect("hom-mismatch", "2015.04.06.def2", "identity homomorphism into the tweaked bundle", hom_mismatch),
        Defect("omega-sq1", "2015.03.27.def5", "Ω violating Δ∘Eq = Ω∘p", omega_sq1),
        Defect("jp-permuted", "2015.03.27.def6", "Jp moved within one fiber of I_pE(Ũ)", jp_permuted),
        Defect("phi-tilde-collapse", "2015.04.06.eq10", "φ̃ collapsing two elements of a fiber", phi_tilde_collapse),
        Defect("omega-incompatible", "2015.04.06.def5", "identity Φ between different Ω", omega_incompatible),
        Defect("e-square-swap", "2015.05.08.constr1", "Q(F)_E with two images swapped in one fiber", e_square_swap),
        Defect("cond2-inj-all", "2015.05.22.cond2", "(injections, all morphisms) against cond2", cond2_inj_all),
        Defect("derive-hypothesis", TH1, "(injections, surjections) with a non-surjective p", derive_hypothesis),
    ]
}


def get_defect(name: str) -> Defect:
    try:
        return DEFECTS[name]
    except KeyError:
        raise FixtureError(f"unknown defect {name!r}; expected one of {sorted(DEFECTS)}") from None
