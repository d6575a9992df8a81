"""
Morphism classes, the right lifting property by search, and the two theorems that
extend a J1-structure (Eq, Ω) to a full J-structure by solving a lifting problem.

Every statement here is verified on bounded fragments of finite sets; nothing is
claimed beyond the bound that was enumerated.
"""
import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence

from loguru import logger

from config.settings import CONDITION_CLAUSE_BOUND, LIFTING_SET_BOUND
from core.category.fincat import FINSET, FinSet, Mor, PT
from core.category.lcc import FinSetLCC
from core.exceptions import HypothesisError, LiftingInvariantError, NonCommutingSquareError
from core.universe.juniv import JUniverse, UnivJBundle, check_univ_j
from core.universe.universe import UniverseCategory
from core.verification.report import CheckRecorder, CheckResult

TH1 = "2015.05.22.th1"
TH2 = "2015.05.16.th1"
THEOREMS = (TH1, TH2)


@dataclass(frozen=True)
class MorphismFamily:
    """A decidable class of morphisms of finite sets, closed under isomorphism of arrows."""

    name: str
    predicate: Callable[[Mor], bool]

    def contains(self, f: Mor) -> bool:
        return bool(self.predicate(f))

    def enumerate(self, bound: int) -> Iterator[Mor]:
        """Members between skeletal sets of size ≤ bound."""
        for f in all_small_morphisms(bound):
            if self.contains(f):
                yield f


ISOMORPHISMS = MorphismFamily("isomorphisms", Mor.is_bijective)
ALL_MORPHISMS = MorphismFamily("all", lambda f: True)
INJECTIONS = MorphismFamily("injections", Mor.is_injective)
SURJECTIONS = MorphismFamily("surjections", Mor.is_surjective)


@dataclass(frozen=True)
class ClassPair:
    """(TC, FB): the lifting-side class and the fibration-side class."""

    name: str
    tc: MorphismFamily
    fb: MorphismFamily


CLASS_PAIRS: Dict[str, ClassPair] = {
    "iso-all": ClassPair("iso-all", ISOMORPHISMS, ALL_MORPHISMS),
    "inj-surj": ClassPair("inj-surj", INJECTIONS, SURJECTIONS),
    "inj-all": ClassPair("inj-all", INJECTIONS, ALL_MORPHISMS),
}


def small_sets(bound: int) -> List[FinSet]:
    return [FinSet.skeletal(n) for n in range(bound + 1)]


def all_small_morphisms(bound: int) -> Iterator[Mor]:
    sets = small_sets(bound)
    for a in sets:
        for b in sets:
            yield from FINSET.hom(a, b)


@dataclass(frozen=True)
class LiftProblem:
    """
    Z --f_Z--> E
    |i         |p
    v          v
    W --f_W--> B
    """

    i: Mor
    p: Mor
    f_Z: Mor
    f_W: Mor

    def commutes(self) -> bool:
        return self.i.then(self.f_W) == self.f_Z.then(self.p)

    def is_solution(self, g: Mor) -> bool:
        return (g.dom == self.i.cod and g.cod == self.p.dom
                and self.i.then(g) == self.f_Z and g.then(self.p) == self.f_W)

    def describe(self) -> Dict:
        return {name: getattr(self, name).describe() for name in ("i", "p", "f_Z", "f_W")}


def find_lift(problem: LiftProblem) -> Optional[Mor]:
    """
    The canonical g: W → E with i∘g = f_Z and g∘p = f_W, or None if there is none.

    Each w is constrained independently: g(w) lies over f_W(w) and equals f_Z(z)
    for every z with i(z) = w; the least admissible element is taken.
    """
    if not problem.commutes():
        raise NonCommutingSquareError("lifting problem square does not commute")
    forced: Dict = {}
    for z, w in problem.i.items():
        forced.setdefault(w, set()).add(problem.f_Z(z))
    table = []
    for w, b in problem.f_W.items():
        if w in forced:
            values = forced[w]
            if len(values) != 1:
                return None
            table.append(next(iter(values)))
            continue
        fiber = problem.p.fiber(b)
        if not fiber:
            return None
        table.append(fiber[0])
    return Mor(problem.i.cod, problem.p.dom, table, check=False)


def lift_problems(i: Mor, p: Mor) -> Iterator[LiftProblem]:
    """Every commuting square with i on the left and p on the right."""
    for f_W in FINSET.hom(i.cod, p.cod):
        fibers = [p.fiber(f_W(w)) for w in i.table]
        for table in itertools.product(*fibers):
            yield LiftProblem(i, p, Mor(i.dom, p.dom, table, check=False), f_W)


def rlp_counterexample(p: Mor, family: MorphismFamily, bound: int) -> Optional[LiftProblem]:
    for i in family.enumerate(bound):
        for problem in lift_problems(i, p):
            if find_lift(problem) is None:
                return problem
    return None


def has_rlp(p: Mor, family: MorphismFamily, bound: int = LIFTING_SET_BOUND) -> bool:
    return rlp_counterexample(p, family, bound) is None


def is_fibrant(B: FinSet, fb: MorphismFamily) -> bool:
    return fb.contains(FINSET.to_terminal(B))


def _clause_bound(bound: int) -> int:
    """Size bound for clauses quantifying over four objects."""
    return min(bound, CONDITION_CLAUSE_BOUND)


def _bounds_note(bound: int, cb: int) -> str:
    return f"two-object clauses enumerated over sets of size ≤ {bound}; four-object clauses over size ≤ {cb}"


def fiber_profile(p: Mor) -> tuple:
    """Isomorphism class of p as an arrow: the sorted fiber sizes over its codomain."""
    return len(p.dom), tuple(sorted(len(p.fiber(b)) for b in p.cod))


def _rlp_clause(rec: CheckRecorder, pair: ClassPair, morphisms: Sequence[Mor], bound: int, clause: str) -> None:
    # every family here is closed under isomorphism, so the lifting property depends only on the profile
    lifts_by_profile: Dict[tuple, bool] = {}
    for p in morphisms:
        rec.instance()
        key = fiber_profile(p)
        if key not in lifts_by_profile:
            lifts_by_profile[key] = rlp_counterexample(p, pair.tc, bound) is None
        has_lift = lifts_by_profile[key]
        in_fb = pair.fb.contains(p)
        if in_fb and not has_lift:
            rec.violation("member of FB without the lifting property", clause=clause, p=p,
                          problem=rlp_counterexample(p, pair.tc, bound))
        elif not in_fb and has_lift:
            rec.violation("morphism with the lifting property is not in FB", clause=clause, p=p)


def check_cond2(pair: ClassPair, bound: int = LIFTING_SET_BOUND, lcc: Optional[FinSetLCC] = None,
                max_instances: Optional[int] = None) -> CheckResult:
    lcc = lcc or FinSetLCC()
    cb = _clause_bound(bound)
    sets = small_sets(cb)
    with CheckRecorder("2015.05.22.cond2", f"{pair.name}: FB = RLP(TC) and Id×i stays in TC", max_instances) as rec:
        _rlp_clause(rec, pair, list(all_small_morphisms(bound)), bound, "1")
        for B in sets:
            fb_into_b = [p for E in sets for p in FINSET.hom(E, B) if pair.fb.contains(p)]
            for p1, p2 in itertools.product(fb_into_b, repeat=2):
                for i in FINSET.hom(p1.dom, p2.dom):
                    if not pair.tc.contains(i) or i.then(p2) != p1:
                        continue
                    for B_prime in sets:
                        for f in FINSET.hom(B_prime, B):
                            rec.instance()
                            source, target = lcc.fiber_product(f, p1), lcc.fiber_product(f, p2)
                            id_times_i = lcc.times(source, target, Mor.identity(B_prime), i)
                            rec.expect(pair.tc.contains(id_times_i), "Id×i is not in TC", clause="2",
                                       f=f, p1=p1, p2=p2, i=i)
        rec.note(_bounds_note(bound, cb))
    return rec.result()


def check_cond1(pair: ClassPair, bound: int = LIFTING_SET_BOUND, lcc: Optional[FinSetLCC] = None,
                max_instances: Optional[int] = None) -> CheckResult:
    lcc = lcc or FinSetLCC()
    cb = _clause_bound(bound)
    sets = small_sets(cb)
    fibrant = [B for B in sets if is_fibrant(B, pair.fb)]
    with CheckRecorder("2015.05.22.cond1", f"{pair.name}: FB over fibrant bases = RLP(TC), i×_B Id_E in TC",
                       max_instances) as rec:
        rec.instance()
        rec.expect(pair.fb.contains(Mor.identity(PT)), "Id_pt is not in FB", clause="1")
        fibrant_full = [B for B in small_sets(bound) if is_fibrant(B, pair.fb)]
        over_fibrant = [p for B in fibrant_full for E in small_sets(bound) for p in FINSET.hom(E, B)]
        _rlp_clause(rec, pair, over_fibrant, bound, "2")
        tc = list(pair.tc.enumerate(cb))
        for p in (p for B in fibrant for E in sets for p in FINSET.hom(E, B)):
            if not pair.fb.contains(p):
                continue
            for i in tc:
                for f in FINSET.hom(i.cod, p.cod):
                    rec.instance()
                    source, target = lcc.fiber_product(i.then(f), p), lcc.fiber_product(f, p)
                    i_times_id = lcc.times(source, target, i, Mor.identity(p.dom))
                    rec.expect(pair.tc.contains(i_times_id), "i×_B Id_E is not in TC", clause="3", p=p, i=i, f=f)
        rec.note(_bounds_note(bound, cb))
    return rec.result()


def check_conditions(pair: ClassPair, which: str, bound: int = LIFTING_SET_BOUND,
                     lcc: Optional[FinSetLCC] = None) -> CheckResult:
    if which == "cond1":
        return check_cond1(pair, bound, lcc)
    if which == "cond2":
        return check_cond2(pair, bound, lcc)
    raise ValueError(f"unknown condition set {which!r}")


def check_fibrancy_lemmas(pair: ClassPair, bound: int = LIFTING_SET_BOUND, lcc: Optional[FinSetLCC] = None,
                          universe_p: Optional[Mor] = None, max_instances: Optional[int] = None) -> List[CheckResult]:
    """Closure of FB under pullback and composition over fibrant bases, and fibrancy of I_p."""
    lcc = lcc or FinSetLCC()
    cb = _clause_bound(bound)
    sets = small_sets(bound)
    fibrant = [B for B in sets if is_fibrant(B, pair.fb)]
    fb_over = {B: [p for E in sets for p in FINSET.hom(E, B) if pair.fb.contains(p)] for B in sets}
    small_fibrant = [V for V in fibrant if len(V) <= cb]

    with CheckRecorder("2015.05.14.l2", "pullbacks of FB between fibrant bases stay in FB", max_instances) as l2:
        for B, B_prime in itertools.product(fibrant, repeat=2):
            for p in fb_over[B]:
                for f in FINSET.hom(B_prime, B):
                    l2.instance()
                    l2.expect(pair.fb.contains(lcc.fiber_product(f, p).pr1), "pulled back morphism is not in FB",
                              p=p, f=f)

    with CheckRecorder("2015.05.14.l4", "composites of FB over a fibrant base stay in FB", max_instances) as l4:
        for B in fibrant:
            for p1 in fb_over[B]:
                for p2 in fb_over.get(p1.dom, []):
                    l4.instance()
                    l4.expect(pair.fb.contains(p2.then(p1)), "composite is not in FB", p1=p1, p2=p2)

    universes = [p for U in fibrant for p in fb_over[U]]
    if universe_p is not None and pair.fb.contains(universe_p) and is_fibrant(universe_p.cod, pair.fb):
        universes.append(universe_p)

    with CheckRecorder("2015.05.14.l1", "prI_p(V) is in FB for fibrant U and V", max_instances) as l1:
        for p in universes:
            for V in small_fibrant:
                l1.instance()
                l1.expect(pair.fb.contains(lcc.i_p(p, V).proj), "prI_p(V) is not in FB", p=p, V=V)
        l1.note(f"V ranges over sets of size ≤ {cb}")

    with CheckRecorder("2015.05.14.l3", "I_p(r) is in FB for r in FB between fibrant objects", max_instances) as l3:
        for p in universes:
            for V in small_fibrant:
                for r in fb_over[V]:
                    if len(r.dom) > cb or not is_fibrant(r.dom, pair.fb):
                        continue
                    l3.instance()
                    l3.expect(pair.fb.contains(lcc.i_p_mor(p, r)), "I_p(r) is not in FB", p=p, r=r)
        l3.note(f"r ranges over morphisms between sets of size ≤ {cb}")

    return [l2.result(), l4.result(), l1.result(), l3.result()]


def _require(condition: bool, hypothesis: str, detail: str = "") -> None:
    if not condition:
        raise HypothesisError(hypothesis, detail)


def derive_j(uc: UniverseCategory, Eq: Mor, Omega: Mor, pair: ClassPair, theorem: str = TH1,
             bound: int = LIFTING_SET_BOUND) -> UnivJBundle:
    """
    Extend (Eq, Ω) to a full J-structure by solving the filler square with ``find_lift``.

    Raises:
        HypothesisError: a hypothesis of the chosen theorem fails at ``bound``
        LiftingInvariantError: no lift exists although every hypothesis was verified
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    ju = JUniverse(uc, Eq, Omega)
    fb, tc = pair.fb, pair.tc
    _require(fb.contains(ju.p), "p ∈ FB", f"p is not in {fb.name}")
    _require(tc.contains(ju.omega), "ω ∈ TC", f"ω is not in {tc.name}")

    if theorem == TH1:
        _require(check_cond2(pair, bound, ju.lcc).passed, "Conditions 2015.05.22.cond2")
        _require(fb.contains(ju.p_e), "pEŨ ∈ FB", "closure of FB under pullback and composition fails at the bound")
        square = ju.filler_square
        _require(tc.contains(square.left), "Id_Fp×ω ∈ TC")
        lift = find_lift(LiftProblem(square.left, square.right, square.top, square.bottom))
        if lift is None:
            raise LiftingInvariantError("filler square has no lift although its hypotheses hold")
        filler = lift
    else:
        _require(is_fibrant(ju.universe.base, fb), "U fibrant")
        _require(check_cond1(pair, bound, ju.lcc).passed, "Conditions 2015.05.22.cond1")
        filler = _permuted_filler(ju, pair)

    logger.debug(f"{theorem}: filler found on {ju.filler_square.target.apex.label}")
    return ju.bundle(ju.filler_to_j(filler))


def _permuted_filler(ju: JUniverse, pair: ClassPair) -> Mor:
    """Solve the square with the factors of both fiber products swapped and the target U×Ũ → U×U."""
    fb, tc, lcc, fp = pair.fb, pair.tc, ju.lcc, ju.fp
    U, Ut = ju.universe.base, ju.universe.total
    _require(fb.contains(ju.p_e), "pEŨ ∈ FB")
    _require(fb.contains(fp.i_pe_u.proj), "prI_pEŨ(U) ∈ FB")
    _require(fb.contains(fp.pr1), "pr1: Fp → I_pEŨ(U) ∈ FB")
    _require(fb.contains(fp.p_fp), "pFp ∈ FB")
    square = ju.filler_square
    swapped_source = lcc.fiber_product(ju.p, fp.p_fp)
    swapped_target = lcc.fiber_product(ju.p_e, fp.p_fp)
    sigma = square.source.pair(swapped_source.pr2, swapped_source.pr1)
    sigma_prime = square.target.pair(swapped_target.pr2, swapped_target.pr1)
    left = lcc.times(swapped_source, swapped_target, ju.omega, Mor.identity(fp.apex))
    _require(tc.contains(left), "ω×Id_Fp ∈ TC")
    right = lcc.times(lcc.product(U, Ut), lcc.product(U, U), Mor.identity(U), ju.p)
    _require(fb.contains(right), "Id_U×p ∈ FB")
    top = sigma.then(lcc.adj(fp.pr2, fp.i_p_utilde))
    bottom = sigma_prime.then(lcc.adj(fp.pr1, fp.i_pe_u))
    lift = find_lift(LiftProblem(left, right, top, bottom))
    if lift is None:
        raise LiftingInvariantError("permuted filler square has no lift although its hypotheses hold")
    unswap = swapped_target.pair(square.target.pr2, square.target.pr1)
    return unswap.then(lift).then(lcc.product(U, Ut).pr2)


def derive_j_from_model_structure(uc: UniverseCategory, Eq: Mor, Omega: Mor, fibrations: MorphismFamily,
                                  trivial_cofibrations: MorphismFamily,
                                  bound: int = LIFTING_SET_BOUND) -> UnivJBundle:
    """Pick whichever theorem's condition set the labeled classes satisfy."""
    pair = ClassPair(f"{trivial_cofibrations.name}/{fibrations.name}", trivial_cofibrations, fibrations)
    lcc = uc.lcc
    if check_cond2(pair, bound, lcc).passed:
        return derive_j(uc, Eq, Omega, pair, TH1, bound)
    if check_cond1(pair, bound, lcc).passed:
        return derive_j(uc, Eq, Omega, pair, TH2, bound)
    raise HypothesisError("2015.05.18.cor1", "the classes satisfy neither condition set")


def check_derive_j(uc: UniverseCategory, Eq: Mor, Omega: Mor, pair: ClassPair, theorem: str = TH1,
                   bound: int = LIFTING_SET_BOUND) -> List[CheckResult]:
    """Run a theorem and validate its output; a failed hypothesis is reported against the theorem id."""
    bundle = None
    with CheckRecorder(theorem, f"{pair.name}: (Eq, Ω) extends to a full J-structure") as rec:
        rec.instance()
        bundle = derive_j(uc, Eq, Omega, pair, theorem, bound)
    results = [rec.result()]
    if bundle is not None:
        results.extend(check_univ_j(JUniverse(uc, Eq, Omega), bundle))
    return results
