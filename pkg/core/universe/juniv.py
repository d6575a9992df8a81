"""
J-structures on a universe: Eq, Ω, ω, the fiber product Fp, coJ, Jp and the
bijection between sections of coJ and fillers of the lifting square.
"""
import itertools
from dataclasses import dataclass, replace
from math import prod
from typing import Dict, Hashable, Iterator, List, Optional, Tuple

from loguru import logger

from config.settings import MAX_SEARCH_RESULTS
from core.category.fincat import CommSquare, Mor
from core.category.lcc import FiberProductChoice, FinSetLCC, SliceHomChoice
from core.exceptions import JStructureError, MaterializationError
from core.universe.universe import EUniverse, UniverseCategory, UniverseStructure
from core.verification.report import CheckRecorder, CheckResult


@dataclass(frozen=True)
class UnivJBundle:
    """(Eq, Ω, Jp) on a universe; Ω and Jp may be absent for partial structures."""

    Eq: Mor
    Omega: Optional[Mor] = None
    Jp: Optional[Mor] = None

    def with_jp(self, Jp: Mor) -> "UnivJBundle":
        return replace(self, Jp=Jp)

    def describe(self) -> Dict:
        data = {"Eq": self.Eq.describe()}
        if self.Omega is not None:
            data["Omega"] = self.Omega.describe()
        if self.Jp is not None:
            data["Jp"] = self.Jp.describe()
        return data


def check_eq_shape(universe: UniverseStructure, Eq: Mor) -> bool:
    return Eq.dom == universe.ext(universe.p).apex and Eq.cod == universe.base


def sq1_commutes(universe: UniverseStructure, Eq: Mor, Omega: Mor) -> bool:
    """Δ∘Eq = Ω∘p."""
    if Omega.dom != universe.total or Omega.cod != universe.total:
        return False
    return universe.delta().then(Eq) == Omega.then(universe.p)


def build_omega(universe: UniverseStructure, Eq: Mor, Omega: Mor) -> Mor:
    """ω = Δ*Ω: Ũ → EŨ = ((Ũ;p);Eq)."""
    if not check_eq_shape(universe, Eq):
        raise JStructureError(f"Eq must be a morphism (Ũ;p) → U, got {Eq!r}")
    if not sq1_commutes(universe, Eq, Omega):
        raise JStructureError("square Δ∘Eq = Ω∘p does not commute")
    return universe.pair(Eq, universe.delta(), Omega)


@dataclass(frozen=True)
class FpData:
    """Fp = (I_{pEŨ}(U), I^ω(U)) ×_{I_p(U)} (I_p(Ũ), I_p(p)) with coJ and pFp."""

    fp: FiberProductChoice
    i_pe_u: SliceHomChoice
    i_pe_utilde: SliceHomChoice
    i_p_u: SliceHomChoice
    i_p_utilde: SliceHomChoice
    i_omega_u: Mor
    i_omega_utilde: Mor
    i_pe_p: Mor
    i_p_p: Mor
    coJ: Mor
    p_fp: Mor

    @property
    def apex(self):
        return self.fp.apex

    @property
    def pr1(self) -> Mor:
        return self.fp.pr1

    @property
    def pr2(self) -> Mor:
        return self.fp.pr2


@dataclass(frozen=True)
class FillerSquare:
    """
    (Fp,pFp)×_U(Ũ,p) --adj(pr2)∘pr2--> Ũ
          |Id×ω                          |p
          v                              v
    (Fp,pFp)×_U(EŨ,pEŨ) --adj(pr1)∘pr2--> U
    """

    source: FiberProductChoice
    target: FiberProductChoice
    left: Mor
    top: Mor
    right: Mor
    bottom: Mor

    @property
    def square(self) -> CommSquare:
        return CommSquare(top=self.top, left=self.left, right=self.right, bottom=self.bottom)

    def splits(self, filler: Mor) -> Tuple[bool, bool]:
        """(upper triangle, lower triangle) of the splitting by ``filler``."""
        return self.left.then(filler) == self.top, filler.then(self.right) == self.bottom


class JUniverse:
    """
    A J1-structure (Eq, Ω) on a universe category with everything derived from it.

    Features:
    - ω and the EŨ universe
    - Fp, coJ and the filler square, built lazily
    - Conversions between Jp and fillers, exhaustive enumeration of both
    """

    def __init__(self, uc: UniverseCategory, Eq: Mor, Omega: Mor):
        self.uc = uc
        self.universe = uc.universe
        self.lcc: FinSetLCC = uc.lcc
        self.Eq = Eq
        self.Omega = Omega
        self.omega = build_omega(self.universe, Eq, Omega)
        self.e = EUniverse(self.universe, Eq)
        self._fp: Optional[FpData] = None
        self._filler: Optional[FillerSquare] = None

    @property
    def p(self) -> Mor:
        return self.universe.p

    @property
    def p_e(self) -> Mor:
        return self.e.p

    @property
    def fp(self) -> FpData:
        if self._fp is None:
            self._fp = build_coj(self.lcc, self.universe, self.e, self.omega)
        return self._fp

    @property
    def filler_square(self) -> FillerSquare:
        if self._filler is None:
            self._filler = build_filler_square(self.lcc, self.universe, self.e, self.omega, self.fp)
        return self._filler

    def is_section_of_coj(self, Jp: Mor) -> bool:
        return Jp.dom == self.fp.apex and Jp.then(self.fp.coJ).is_identity()

    def filler_to_pair(self, filler: Mor) -> Mor:
        """Repackage a Ũ-valued filler as the U×Ũ-valued one over U."""
        square = self.filler_square
        base = square.target.pr1.then(self.fp.p_fp)
        return self.lcc.product(self.universe.base, self.universe.total).pair(base, filler)

    def pair_to_filler(self, g: Mor) -> Mor:
        return g.then(self.lcc.product(self.universe.base, self.universe.total).pr2)

    def filler_to_j(self, filler: Mor) -> Mor:
        """
        Jp = adj⁻¹ of the repackaged filler.

        Raises:
            JStructureError: naming the triangle the filler fails to split
        """
        square = self.filler_square
        if filler.dom != square.target.apex or filler.cod != self.universe.total:
            raise JStructureError(f"{filler!r} is not a morphism Fp×_U EŨ → Ũ")
        upper, lower = square.splits(filler)
        if not upper:
            raise JStructureError("filler does not split the upper triangle (Id×ω)∘f = adj(pr2)∘pr2")
        if not lower:
            raise JStructureError("filler does not split the lower triangle f∘p = adj(pr1)∘pr2")
        return self.lcc.adj_inv(self.filler_to_pair(filler), self.fp.i_pe_utilde, self.fp.p_fp)

    def j_to_filler(self, Jp: Mor) -> Mor:
        if Jp.dom != self.fp.apex or Jp.cod != self.fp.i_pe_utilde.obj:
            raise JStructureError(f"{Jp!r} is not a morphism Fp → I_pE(Ũ)")
        if not self.is_section_of_coj(Jp):
            raise JStructureError("Jp∘coJ is not the identity")
        return self.pair_to_filler(self.lcc.adj(Jp, self.fp.i_pe_utilde))

    def jp_choices(self) -> List[Tuple[Hashable, ...]]:
        """For every y ∈ Fp, the x ∈ I_pE(Ũ) with coJ(x) = y."""
        coJ = self.fp.coJ
        preimages: Dict[Hashable, List[Hashable]] = {y: [] for y in coJ.cod.elements}
        for x, y in coJ.items():
            preimages[y].append(x)
        return [tuple(preimages[y]) for y in coJ.cod.elements]

    def count_jp(self) -> int:
        return prod(len(choices) for choices in self.jp_choices())

    def enumerate_jp(self, limit: Optional[int] = None) -> Iterator[Mor]:
        cap = MAX_SEARCH_RESULTS if limit is None else limit
        if self.count_jp() > cap:
            raise MaterializationError(f"{self.count_jp()} sections of coJ exceed the search cap {cap}")
        fp = self.fp
        for table in itertools.product(*self.jp_choices()):
            yield Mor(fp.apex, fp.i_pe_utilde.obj, table, check=False)

    def filler_choices(self) -> List[Tuple[Hashable, ...]]:
        """For every b, the u ∈ Ũ over bottom(b) agreeing with top on the preimages of b."""
        square = self.filler_square
        forced: Dict[Hashable, set] = {}
        for a, b in square.left.items():
            forced.setdefault(b, set()).add(square.top(a))
        choices = []
        for b, base in square.bottom.items():
            allowed = [u for u in self.universe.p.fiber(base)]
            if b in forced:
                allowed = [u for u in allowed if {u} == forced[b]]
            choices.append(tuple(allowed))
        return choices

    def count_fillers(self) -> int:
        return prod(len(choices) for choices in self.filler_choices())

    def enumerate_fillers(self, limit: Optional[int] = None) -> Iterator[Mor]:
        cap = MAX_SEARCH_RESULTS if limit is None else limit
        if self.count_fillers() > cap:
            raise MaterializationError(f"{self.count_fillers()} fillers exceed the search cap {cap}")
        square = self.filler_square
        for table in itertools.product(*self.filler_choices()):
            yield Mor(square.target.apex, self.universe.total, table, check=False)

    def extensional_filler(self) -> Mor:
        """(Id×ω)⁻¹∘top when ω, hence Id×ω, is bijective."""
        square = self.filler_square
        if not square.left.is_bijective():
            raise JStructureError("Id×ω is not invertible")
        return square.left.inverse().then(square.top)

    def bundle(self, Jp: Optional[Mor] = None) -> UnivJBundle:
        return UnivJBundle(self.Eq, self.Omega, Jp)


def build_coj(lcc: FinSetLCC, universe: UniverseStructure, e: EUniverse, omega: Mor) -> FpData:
    p, p_e = universe.p, e.p
    U, Ut = universe.base, universe.total
    i_pe_u = lcc.i_p(p_e, U)
    i_pe_utilde = lcc.i_p(p_e, Ut)
    i_p_u = lcc.i_p(p, U)
    i_p_utilde = lcc.i_p(p, Ut)
    i_omega_u = lcc.i_hom(omega, p_e, p, U)
    i_omega_utilde = lcc.i_hom(omega, p_e, p, Ut)
    i_pe_p = lcc.i_p_mor(p_e, p)
    i_p_p = lcc.i_p_mor(p, p)
    fp = lcc.fiber_product(i_omega_u, i_p_p)
    coJ = fp.pair(i_pe_p, i_omega_utilde)
    p_fp = fp.pr1.then(i_pe_u.proj)
    logger.debug(f"Fp has {len(fp.apex)} elements; I_pE(Ũ) has {len(i_pe_utilde.obj)}")
    return FpData(fp, i_pe_u, i_pe_utilde, i_p_u, i_p_utilde, i_omega_u, i_omega_utilde, i_pe_p, i_p_p, coJ, p_fp)


def build_filler_square(lcc: FinSetLCC, universe: UniverseStructure, e: EUniverse, omega: Mor,
                        fp: FpData) -> FillerSquare:
    U, Ut = universe.base, universe.total
    source = lcc.fiber_product(fp.p_fp, universe.p)
    target = lcc.fiber_product(fp.p_fp, e.p)
    left = lcc.times(source, target, Mor.identity(fp.apex), omega)
    top = lcc.adj(fp.pr2, fp.i_p_utilde).then(lcc.product(U, Ut).pr2)
    bottom = lcc.adj(fp.pr1, fp.i_pe_u).then(lcc.product(U, U).pr2)
    return FillerSquare(source, target, left, top, universe.p, bottom)


def fp_fiber_counts(ju: JUniverse) -> Dict[Hashable, int]:
    fp = ju.fp
    return {code: len(fp.p_fp.fiber(code)) for code in ju.universe.base.elements}


def fp_fiber_counts_oracle(ju: JUniverse) -> Dict[Hashable, int]:
    """Pairs of function tables a: pEŨ_c → U, b: Ũ_c → Ũ with ω∘a = b∘p, counted per code c."""
    universe, omega = ju.universe, ju.omega
    U, Ut = universe.base, universe.total
    counts = {}
    for code in U.elements:
        tilde_fiber = universe.p.fiber(code)
        e_fiber = ju.p_e.fiber(code)
        position = {x: i for i, x in enumerate(e_fiber)}
        count = 0
        for a in itertools.product(U.elements, repeat=len(e_fiber)):
            for b in itertools.product(Ut.elements, repeat=len(tilde_fiber)):
                if all(a[position[omega(u)]] == universe.p(b[k]) for k, u in enumerate(tilde_fiber)):
                    count += 1
        counts[code] = count
    return counts


def check_univ_j(ju: JUniverse, bundle: UnivJBundle, max_instances: Optional[int] = None) -> List[CheckResult]:
    """Shape of Eq, the square Δ∘Eq = Ω∘p, and Jp∘coJ = Id with its two consequences."""
    universe = ju.universe
    with CheckRecorder("2015.03.27.def4", "Eq is a morphism (Ũ;p) → U", max_instances) as def4:
        def4.instance()
        def4.expect(check_eq_shape(universe, bundle.Eq), "Eq has the wrong domain or codomain", Eq=bundle.Eq)
    with CheckRecorder("2015.03.27.def5", "Δ∘Eq = Ω∘p", max_instances) as def5:
        if bundle.Omega is None:
            def5.skip("no Ω supplied")
        else:
            delta_eq = universe.delta().then(bundle.Eq)
            omega_p = bundle.Omega.then(universe.p)
            for u in universe.total.elements:
                def5.instance()
                def5.expect(delta_eq(u) == omega_p(u), "square Δ∘Eq = Ω∘p fails", element=u)
    results = [def4.result(), def5.result()]
    with CheckRecorder("2015.03.27.def6", "Jp∘coJ = Id", max_instances) as def6:
        if bundle.Jp is None:
            def6.skip("no Jp supplied")
        else:
            fp = ju.fp
            jp = bundle.Jp
            if def6.expect(jp.dom == fp.apex and jp.cod == fp.i_pe_utilde.obj, "Jp has the wrong shape"):
                composite = jp.then(fp.coJ)
                for y, image in composite.items():
                    def6.instance()
                    def6.expect(image == y, "coJ(Jp(y)) differs from y", element=y, image=image)
    results.append(def6.result())
    if bundle.Jp is not None and def6.result().passed:
        with CheckRecorder("2015.04.04.eq1", "Jp∘I^ω(Ũ) = pr2 and Jp∘I_pE(p) = pr1", max_instances) as eqs:
            fp = ju.fp
            eqs.instance()
            eqs.expect(bundle.Jp.then(fp.i_omega_utilde) == fp.pr2, "Jp∘I^ω(Ũ) differs from pr2")
            eqs.expect(bundle.Jp.then(fp.i_pe_p) == fp.pr1, "Jp∘I_pE(p) differs from pr1")
            eqs.expect(bundle.Jp.then(fp.i_pe_utilde.proj) == fp.p_fp, "Jp is not over U")
        results.append(eqs.result())
    return results


def check_coj(ju: JUniverse, max_instances: Optional[int] = None) -> CheckResult:
    """
    The coJ square commutes, Fp fiber sizes match the function-table count, and
    coJ(x) = y iff I_pE(p)(x) = pr1(y) and I^ω(Ũ)(x) = pr2(y).
    """
    fp = ju.fp
    with CheckRecorder("2010.sq1", "coJ square, Fp fibers and the section characterization", max_instances) as rec:
        rec.instance()
        rec.expect(fp.i_pe_p.then(fp.i_omega_u) == fp.i_omega_utilde.then(fp.i_p_p), "coJ square does not commute")
        oracle = fp_fiber_counts_oracle(ju)
        for code, count in fp_fiber_counts(ju).items():
            rec.instance()
            rec.expect(count == oracle[code], "Fp fiber size differs from the function-table count", code=code,
                       size=count, expected=oracle[code])
        pr1, pr2 = fp.pr1.as_dict(), fp.pr2.as_dict()
        for x, image in fp.coJ.items():
            left, right = fp.i_pe_p(x), fp.i_omega_utilde(x)
            for y in fp.apex.elements:
                rec.instance()
                rec.expect((image == y) == (left == pr1[y] and right == pr2[y]),
                           "section characterization of coJ fails", x=x, y=y)
    return rec.result()


def check_filler_bijection(ju: JUniverse, limit: Optional[int] = None,
                           max_instances: Optional[int] = None) -> CheckResult:
    """Exhaustive Jp and filler searches have equal counts and the conversions are mutually inverse."""
    with CheckRecorder("2015.05.22.constr1", "sections of coJ correspond to fillers", max_instances) as rec:
        jp_count, filler_count = ju.count_jp(), ju.count_fillers()
        rec.note(f"{jp_count} sections of coJ, {filler_count} fillers")
        rec.expect(jp_count == filler_count, "Jp and filler counts differ", jp=jp_count, fillers=filler_count)
        cap = MAX_SEARCH_RESULTS if limit is None else limit
        if max(jp_count, filler_count) > cap:
            rec.complete = False
            rec.note(f"round trips not enumerated beyond the search cap {cap}")
        else:
            for jp in ju.enumerate_jp(cap):
                rec.instance()
                filler = ju.j_to_filler(jp)
                rec.expect(all(ju.filler_square.splits(filler)), "j_to_filler does not split the square", Jp=jp)
                rec.expect(ju.filler_to_j(filler) == jp, "filler_to_j(j_to_filler(Jp)) differs from Jp", Jp=jp)
            for filler in ju.enumerate_fillers(cap):
                rec.instance()
                rec.expect(ju.pair_to_filler(ju.filler_to_pair(filler)) == filler, "repackaging is not invertible")
                jp = ju.filler_to_j(filler)
                rec.expect(ju.is_section_of_coj(jp), "filler_to_j is not a section of coJ", filler=filler)
                rec.expect(ju.j_to_filler(jp) == filler, "j_to_filler(filler_to_j(f)) differs from f", filler=filler)
    return rec.result()
