"""
Functors of universe categories in finite sets and what they induce: the comparison
isomorphisms Φ_{X,F}, the maps χ, ξ, ζ and R_Φ between the I_p constructions, and the
homomorphism H(Φ): CC(C,p) → CC(C′,p′) with its isomorphisms ψ_Γ.
"""
import threading
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

from loguru import logger

from core.category.fincat import FINSET, CommSquare, FinSet, FunctorData, Mor, PT, check_functor, mediate, verify_pullback
from core.category.lcc import DpElement, FinSetLCC, d_f, d_p_act, d_p_elements, d_p_post, eta, eta_bang
from core.csystem.cc_univ import CCMor, CCObject, PT_OBJECT, UniverseCSystem
from core.csystem.csystem import CSystemHomomorphism, check_homomorphism
from core.csystem.jcs import JBundleC, check_hom_j, idx_t
from core.csystem.transfer import transfer_bundle
from core.exceptions import CompatibilityError, NonCommutingSquareError, PullbackError
from core.universe.juniv import JUniverse
from core.universe.universe import EUniverse, UniverseCategory, UniverseStructure, fixture_morphisms
from core.verification.report import CheckRecorder, CheckResult, skipped_result

H_J_LABELS = {"j0": "2015.04.12.l1", "j1": "2015.04.12.l2", "j2": "2015.04.12.l3"}

FACE_LABEL_NOTE = (
    "vertical legs follow the proof's diagrams, I_(p_i)(p_1); the displayed statement labels them "
    "I_(p_i)(p_2), which does not typecheck against I_(p_i)(Ũ_1)"
)


def _test_objects(size: int) -> List[FinSet]:
    return [FinSet.skeletal(n) for n in range(size + 1)]


class UnivCatFunctor:
    """
    A functor of universe categories (Φ, φ, φ̃) between two universes in finite sets.

    Features:
    - Φ_{X,F} and its inverse ι, memoized per F
    - ΦŨp, and φ̃_E with the induced functor of the EŨ universes once Eq, Eq′ are given
    - Φ² on D_p elements and the comparison χ(V)
    """

    def __init__(
        self,
        source: UniverseStructure,
        target: UniverseStructure,
        phi: Mor,
        phi_tilde: Mor,
        functor: Optional[FunctorData] = None,
        source_lcc: Optional[FinSetLCC] = None,
        target_lcc: Optional[FinSetLCC] = None,
        name: str = "Φ",
    ):
        self.source = source
        self.target = target
        self.functor = functor or FunctorData.identity()
        self.phi = phi
        self.phi_tilde = phi_tilde
        self.source_lcc = source_lcc or FinSetLCC()
        self.target_lcc = target_lcc or self.source_lcc
        self.name = name
        if phi.dom != self.ob(source.base) or phi.cod != target.base:
            raise CompatibilityError(f"φ must be a morphism Φ(U) → U′, got {phi!r}")
        if phi_tilde.dom != self.ob(source.total) or phi_tilde.cod != target.total:
            raise CompatibilityError(f"φ̃ must be a morphism Φ(Ũ) → Ũ′, got {phi_tilde!r}")
        self._comparisons: Dict[Mor, Mor] = {}
        self._inverses: Dict[Mor, Mor] = {}
        self._chi: Dict[FinSet, Mor] = {}
        self._lock = threading.Lock()

    @classmethod
    def between(cls, source: UniverseCategory, target: UniverseCategory, phi: Mor, phi_tilde: Mor,
                functor: Optional[FunctorData] = None, name: str = "Φ") -> "UnivCatFunctor":
        return cls(source.universe, target.universe, phi, phi_tilde, functor, source.lcc, target.lcc, name)

    def __repr__(self) -> str:
        return f"UnivCatFunctor({self.name}: {self.source.name} -> {self.target.name})"

    def ob(self, x: FinSet) -> FinSet:
        return self.functor.ob(x)

    def ar(self, f: Mor) -> Mor:
        return self.functor.ar(f)

    @property
    def pullback_square(self) -> CommSquare:
        """Φ(Ũ) → Ũ′ over Φ(U) → U′."""
        return CommSquare(top=self.phi_tilde, left=self.ar(self.source.p), right=self.target.p, bottom=self.phi)

    def square_commutes(self) -> bool:
        return self.ar(self.source.p).then(self.phi) == self.phi_tilde.then(self.target.p)

    def comparison(self, F: Mor) -> Mor:
        """Φ_{X,F} = Φ(p_{X,F})*(Φ(Q(F))∘φ̃): Φ((X;F)) → (Φ(X);Φ(F)∘φ)."""
        cached = self._comparisons.get(F)
        if cached is None:
            square = self.source.ext(F)
            cached = self.target.pair(
                self.ar(F).then(self.phi), self.ar(square.proj), self.ar(square.q).then(self.phi_tilde)
            )
            with self._lock:
                cached = self._comparisons.setdefault(F, cached)
        return cached

    def iota(self, F: Mor) -> Mor:
        """ι = Φ_{X,F}⁻¹."""
        cached = self._inverses.get(F)
        if cached is None:
            comparison = self.comparison(F)
            if not comparison.is_bijective():
                raise CompatibilityError(f"Φ_(X,F) is not an isomorphism for F = {F!r}")
            inverse = comparison.inverse()
            with self._lock:
                cached = self._inverses.setdefault(F, inverse)
        return cached

    def phi_u_tilde_p(self) -> Mor:
        """ΦŨp = Φ_{Ũ,p}∘Q′(φ̃,p′): Φ((Ũ;p)) → (Ũ′;p′)."""
        if not self.square_commutes():
            raise CompatibilityError("Φ(p)∘φ differs from φ̃∘p′")
        return self.comparison(self.source.p).then(self.target.q_of(self.phi_tilde, self.target.p))

    def eq_square_commutes(self, Eq: Mor, Eq_prime: Mor) -> bool:
        return self.ar(Eq).then(self.phi) == self.phi_u_tilde_p().then(Eq_prime)

    def phi_tilde_e(self, Eq: Mor, Eq_prime: Mor) -> Mor:
        """φ̃_E = (Φ(p_{(Ũ;p),Eq})∘ΦŨp)*(Φ(Q(Eq))∘φ̃): Φ(EŨ) → EŨ′."""
        if not self.eq_square_commutes(Eq, Eq_prime):
            raise CompatibilityError(f"{self.name} is not compatible with Eq and Eq′")
        square = self.source.ext(Eq)
        return self.target.pair(
            Eq_prime, self.ar(square.proj).then(self.phi_u_tilde_p()), self.ar(square.q).then(self.phi_tilde)
        )

    def e_functor(self, source_e: EUniverse, target_e: EUniverse) -> "UnivCatFunctor":
        """(Φ, φ, φ̃_E) between the EŨ universes."""
        if source_e.base_universe.p != self.source.p or target_e.base_universe.p != self.target.p:
            raise CompatibilityError("EŨ universes are not built over the universes of the functor")
        return UnivCatFunctor(
            source_e, target_e, self.phi, self.phi_tilde_e(source_e.Eq, target_e.Eq), self.functor,
            self.source_lcc, self.target_lcc, name=f"{self.name}_E",
        )

    def phi2(self, d: DpElement) -> DpElement:
        """Φ²(F1,F2) = (Φ(F1)∘φ, ι∘Φ(F2)) in D_{p′}(Φ(X),Φ(V))."""
        return DpElement(self.ar(d.F).then(self.phi), self.iota(d.F).then(self.ar(d.a)))

    def transport(self, a: Mor, V: FinSet) -> Mor:
        """η′(Φ²(η⁻¹(a))) for a: Y → I_p(V)."""
        decoded = eta_bang(self.source, self.source_lcc, a, V)
        return eta(self.target, self.target_lcc, self.phi2(decoded), self.ob(V))

    def chi(self, V: FinSet) -> Mor:
        """χ(V) = η′(Φ²(η⁻¹(Id_{I_p(V)}))): Φ(I_p(V)) → I_{p′}(Φ(V))."""
        cached = self._chi.get(V)
        if cached is None:
            hom = self.source_lcc.i_p(self.source.p, V)
            chi = self.transport(Mor.identity(hom.obj), V)
            with self._lock:
                cached = self._chi.setdefault(V, chi)
            logger.debug(f"χ_{self.name}({V.label}) computed on {len(hom.obj)} elements")
        return cached


@dataclass(frozen=True)
class TwoUniverseSetup:
    """
    Universes p1, p2 over a common U with g: Ũ1 → Ũ2 over U, their primed counterparts
    with g′, and functors (Φ, φ, φ̃1), (Φ, φ, φ̃2).
    """

    first: UnivCatFunctor
    second: UnivCatFunctor
    g: Mor
    g_prime: Mor

    def __post_init__(self):
        if self.first.functor is not self.second.functor or self.first.phi != self.second.phi:
            raise CompatibilityError("both functors must share Φ and φ")
        if self.g.then(self.second.source.p) != self.first.source.p:
            raise CompatibilityError(f"{self.g!r} is not a morphism over U")
        if self.g_prime.then(self.second.target.p) != self.first.target.p:
            raise CompatibilityError(f"{self.g_prime!r} is not a morphism over U′")

    def tilde_square_commutes(self) -> bool:
        """φ̃1∘g′ = Φ(g)∘φ̃2."""
        return self.first.phi_tilde.then(self.g_prime) == self.first.ar(self.g).then(self.second.phi_tilde)

    def functor_at(self, i: int) -> UnivCatFunctor:
        return self.first if i == 1 else self.second

    def d_g(self, d: DpElement) -> DpElement:
        return d_f(self.second.source, self.first.source, self.g, d)

    def d_g_prime(self, d: DpElement) -> DpElement:
        return d_f(self.second.target, self.first.target, self.g_prime, d)

    def i_g(self, V: FinSet) -> Mor:
        return self.first.source_lcc.i_hom(self.g, self.second.source.p, self.first.source.p, V)

    def i_g_prime(self, V: FinSet) -> Mor:
        return self.first.target_lcc.i_hom(self.g_prime, self.second.target.p, self.first.target.p, V)

    def zeta(self, i: int) -> Mor:
        """ζ_i = χ_i(U)∘I_{p_i′}(φ)."""
        functor = self.functor_at(i)
        return functor.chi(functor.source.base).then(functor.target_lcc.i_p_mor(functor.target.p, functor.phi))

    def zeta_tilde(self, i: int) -> Mor:
        """ζ̃_i = χ_i(Ũ1)∘I_{p_i′}(φ̃1)."""
        functor = self.functor_at(i)
        return functor.chi(self.first.source.total).then(
            functor.target_lcc.i_p_mor(functor.target.p, self.first.phi_tilde)
        )

    def faces(self) -> Dict[str, Tuple[Mor, Mor]]:
        """The four faces of the cube from the Φ-image of the source square to the target square."""
        first, second = self.first, self.second
        ar = first.ar
        U, Ut = first.source.base, first.source.total
        U_prime, Ut_prime = first.target.base, first.target.total
        p1, p2 = first.source.p, second.source.p
        p1_prime, p2_prime = first.target.p, second.target.p
        z1, z2 = self.zeta(1), self.zeta(2)
        zt1, zt2 = self.zeta_tilde(1), self.zeta_tilde(2)
        source_lcc, target_lcc = first.source_lcc, first.target_lcc
        return {
            "top": (ar(self.i_g(Ut)).then(zt1), zt2.then(self.i_g_prime(Ut_prime))),
            "bottom": (ar(self.i_g(U)).then(z1), z2.then(self.i_g_prime(U_prime))),
            "left": (ar(source_lcc.i_p_mor(p2, p1)).then(z2), zt2.then(target_lcc.i_p_mor(p2_prime, p1_prime))),
            "right": (ar(source_lcc.i_p_mor(p1, p1)).then(z1), zt1.then(target_lcc.i_p_mor(p1_prime, p1_prime))),
        }


class XiZeta(NamedTuple):
    xi: Mor
    xi_tilde: Mor
    zeta: Mor
    zeta_tilde: Mor


@dataclass
class JFunctorData:
    """
    A universe category functor together with J-structures on both sides.

    Features:
    - The EŨ functor (Φ, φ, φ̃_E) and the two-universe setup (p, pEŨ, ω)
    - ξ, ξ̃, ζ, ζ̃ and R_Φ: Φ(Fp) → Fp′
    - Compatibility predicates for Eq, Ω and Jp
    """

    base: UnivCatFunctor
    source: JUniverse
    target: JUniverse
    source_jp: Optional[Mor] = None
    target_jp: Optional[Mor] = None
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.base.source.p != self.source.p or self.base.target.p != self.target.p:
            raise CompatibilityError("J-structures do not live on the universes of the functor")

    def _memo(self, key: str, compute):
        if key not in self._cache:
            value = compute()
            with self._lock:
                self._cache.setdefault(key, value)
        return self._cache[key]

    @property
    def e(self) -> UnivCatFunctor:
        return self._memo("e", lambda: self.base.e_functor(self.source.e, self.target.e))

    @property
    def setup(self) -> TwoUniverseSetup:
        return self._memo("setup", lambda: TwoUniverseSetup(self.base, self.e, self.source.omega, self.target.omega))

    def eq_compatible(self) -> bool:
        return self.base.eq_square_commutes(self.source.Eq, self.target.Eq)

    def omega_compatible(self) -> bool:
        """Φ(Ω)∘φ̃ = φ̃∘Ω′."""
        return self.base.ar(self.source.Omega).then(self.base.phi_tilde) == \
            self.base.phi_tilde.then(self.target.Omega)

    def xi_zeta(self) -> XiZeta:
        setup = self.setup
        return self._memo(
            "xi_zeta", lambda: XiZeta(setup.zeta(1), setup.zeta_tilde(1), setup.zeta(2), setup.zeta_tilde(2))
        )

    def r_phi(self) -> Mor:
        """R_Φ: Φ(Fp) → Fp′ with components Φ(pr1)∘ζ and Φ(pr2)∘ξ̃."""
        def compute():
            maps = self.xi_zeta()
            fp, fp_prime = self.source.fp, self.target.fp
            return fp_prime.fp.pair(self.base.ar(fp.pr1).then(maps.zeta), self.base.ar(fp.pr2).then(maps.xi_tilde))

        return self._memo("r_phi", compute)

    def jp_compatible(self) -> bool:
        """Φ(Jp)∘ζ̃ = R_Φ∘Jp′."""
        return self.base.ar(self.source_jp).then(self.xi_zeta().zeta_tilde) == self.r_phi().then(self.target_jp)


class InducedHomomorphism:
    """
    H(Φ): CC(C,p) → CC(C′,p′) with ψ_Γ: int′(H(Γ)) → Φ(int(Γ)).

    H((Γ,F)) = (H(Γ), ψ_Γ∘Φ(F)∘φ) and ψ_(Γ,F) is the mediating morphism into the
    pullback Φ((int Γ;F)) of Φ(F)∘φ and p′.
    """

    def __init__(self, functor: UnivCatFunctor, source: UniverseCSystem, target: UniverseCSystem):
        if source.universe.p != functor.source.p or target.universe.p != functor.target.p:
            raise CompatibilityError("C-systems are not built on the universes of the functor")
        self.functor = functor
        self.source = source
        self.target = target
        terminal = functor.ob(PT)
        if len(terminal) != 1:
            raise CompatibilityError(f"Φ(pt) has {len(terminal)} elements")
        self._objects: Dict[CCObject, CCObject] = {PT_OBJECT: PT_OBJECT}
        self._psi: Dict[CCObject, Mor] = {PT_OBJECT: Mor.constant(PT, terminal, terminal.elements[0])}
        self._psi_inv: Dict[CCObject, Mor] = {}

    def _extend(self, gamma: CCObject) -> None:
        if gamma in self._objects:
            return
        parent = gamma.parent
        self._extend(parent)
        functor = self.functor
        psi_parent = self._psi[parent]
        F = gamma.last
        image = psi_parent.then(functor.ar(F)).then(functor.phi)
        target_square = functor.target.ext(image)
        source_square = functor.source.ext(F)
        try:
            psi = mediate(
                functor.ar(source_square.proj),
                functor.ar(source_square.q).then(functor.phi_tilde),
                target_square.proj.then(psi_parent),
                target_square.q,
            )
        except PullbackError as e:
            raise CompatibilityError(f"Φ((X;F)) is not a pullback of Φ(F)∘φ and p′: {e}") from None
        self._objects[gamma] = self._objects[parent].extend(image)
        self._psi[gamma] = psi

    def ob(self, gamma: CCObject) -> CCObject:
        self._extend(gamma)
        return self._objects[gamma]

    def psi(self, gamma: CCObject) -> Mor:
        self._extend(gamma)
        return self._psi[gamma]

    def psi_inv(self, gamma: CCObject) -> Mor:
        cached = self._psi_inv.get(gamma)
        if cached is None:
            psi = self.psi(gamma)
            if not psi.is_bijective():
                raise CompatibilityError(f"ψ is not an isomorphism at {gamma!r}")
            cached = self._psi_inv.setdefault(gamma, psi.inverse())
        return cached

    def ar(self, f: CCMor) -> CCMor:
        """H(f) = ψ_Γ∘Φ(f)∘ψ_{Γ′}⁻¹."""
        return CCMor(self.ob(f.dom), self.ob(f.cod), self.psi(f.dom).then(self.functor.ar(f.mor)).then(self.psi_inv(f.cod)))

    @property
    def homomorphism(self) -> CSystemHomomorphism:
        return CSystemHomomorphism(self.source, self.target, self.ob, self.ar, name=f"H({self.functor.name})")


def h_of(functor: UnivCatFunctor, source: Optional[UniverseCSystem] = None,
         target: Optional[UniverseCSystem] = None) -> InducedHomomorphism:
    return InducedHomomorphism(
        functor,
        source or UniverseCSystem(functor.source),
        target or UniverseCSystem(functor.target),
    )


def _expect_pullback(rec: CheckRecorder, square: CommSquare, message: str, **payload) -> None:
    try:
        rec.expect(verify_pullback(square), message, **payload)
    except NonCommutingSquareError as e:
        rec.violation(f"{message}: {e}", **payload)


def check_structure(F: UnivCatFunctor, bound: int, max_instances: Optional[int] = None) -> List[CheckResult]:
    """Φ preserves pt and canonical squares, (2015.04.06.eq10) is a pullback, ΦŨp and its lemmas."""
    objects = _test_objects(bound)
    morphisms = fixture_morphisms(F.source, objects)
    results = [check_functor(F.functor, bound=bound + 1,
                             squares=[F.source.ext(G).square for G in morphisms], max_instances=max_instances)]
    with CheckRecorder("2015.04.06.eq10", f"{F.name} is a functor of universe categories", max_instances) as rec:
        rec.instance()
        rec.expect(len(F.ob(PT)) == 1, "Φ(pt) is not final")
        _expect_pullback(rec, F.pullback_square, "Φ(p), φ, φ̃, p′ is not a pullback")
        for G in morphisms:
            rec.instance()
            rec.expect(F.comparison(G).is_bijective(), "Φ_(X,F) is not an isomorphism", F=G)
    results.append(rec.result())
    if not rec.result().passed:
        for check_id in ("2015.04.10.l5", "2015.04.10.l6", "2015.04.06.l5"):
            results.append(skipped_result(check_id, f"ΦŨp of {F.name}", "functor of universe categories check failed"))
        return results
    source, target = F.source, F.target
    phi_u_tilde_p = F.phi_u_tilde_p()
    square_p = source.ext(source.p)
    target_square_p = target.ext(target.p)
    with CheckRecorder("2015.04.10.l5", "ΦŨp = (Φ(p_(Ũ,p))∘φ̃)*(Φ(Q(p))∘φ̃)", max_instances) as l5:
        l5.instance()
        l5.expect(
            phi_u_tilde_p == target.pair(target.p, F.ar(square_p.proj).then(F.phi_tilde),
                                         F.ar(square_p.q).then(F.phi_tilde)),
            "ΦŨp differs from the paired description",
        )
    with CheckRecorder("2015.04.10.l6", "Φ(Δ)∘ΦŨp = φ̃*φ̃", max_instances) as l6:
        l6.instance()
        l6.expect(F.ar(source.delta()).then(phi_u_tilde_p) == target.pair(target.p, F.phi_tilde, F.phi_tilde),
                  "Φ(Δ)∘ΦŨp differs from φ̃*φ̃")
    with CheckRecorder("2015.04.06.l5", "ΦŨp square over φ̃ is a pullback", max_instances) as pb:
        pb.instance()
        _expect_pullback(pb, CommSquare(top=phi_u_tilde_p, left=F.ar(square_p.proj), right=target_square_p.proj,
                                        bottom=F.phi_tilde), "ΦŨp square is not a pullback")
    results.extend([l5.result(), l6.result(), pb.result()])
    return results


def check_compatibility(data: JFunctorData, max_instances: Optional[int] = None) -> List[CheckResult]:
    """Definitions 2015.04.06.def4, def5 and, when both Jp are present, def6."""
    F = data.base
    with CheckRecorder("2015.04.06.def4", f"{F.name} is compatible with Eq and Eq′", max_instances) as def4:
        def4.instance()
        def4.expect(data.eq_compatible(), "Φ(Eq)∘φ differs from ΦŨp∘Eq′")
    with CheckRecorder("2015.04.06.def5", f"{F.name} is compatible with Ω and Ω′", max_instances) as def5:
        def5.instance()
        def5.expect(data.omega_compatible(), "Φ(Ω)∘φ̃ differs from φ̃∘Ω′")
    results = [def4.result(), def5.result()]
    if data.source_jp is None or data.target_jp is None:
        return results
    if not def4.result().passed:
        results.append(skipped_result("2015.04.06.def6", f"{F.name} is compatible with Jp and Jp′",
                                      "not compatible with Eq and Eq′"))
        return results
    with CheckRecorder("2015.04.06.def6", f"{F.name} is compatible with Jp and Jp′", max_instances) as def6:
        def6.instance()
        maps = data.xi_zeta()
        r = data.r_phi()
        fp, fp_prime = data.source.fp, data.target.fp
        def6.expect(r.then(fp_prime.pr1) == F.ar(fp.pr1).then(maps.zeta), "R_Φ∘pr1′ differs from Φ(pr1)∘ζ")
        def6.expect(r.then(fp_prime.pr2) == F.ar(fp.pr2).then(maps.xi_tilde), "R_Φ∘pr2′ differs from Φ(pr2)∘ξ̃")
        def6.expect(data.jp_compatible(), "Φ(Jp)∘ζ̃ differs from R_Φ∘Jp′")
    results.append(def6.result())
    return results


def check_e_functor(data: JFunctorData, max_instances: Optional[int] = None) -> List[CheckResult]:
    """The φ̃_E squares of Lemmas 2015.04.06.l4/l6 and the ω square of Lemma 2015.04.10.l7."""
    F, e = data.base, data.e
    source, target = data.source, data.target
    with CheckRecorder("2015.04.06.l4", "φ̃_E square over ΦŨp is a pullback", max_instances) as l4:
        l4.instance()
        _expect_pullback(l4, CommSquare(top=e.phi_tilde, left=F.ar(source.e.second.proj),
                                        right=target.e.second.proj, bottom=F.phi_u_tilde_p()),
                         "φ̃_E square over ΦŨp is not a pullback")
    with CheckRecorder("2015.04.06.l6", "φ̃_E square over φ is a pullback", max_instances) as l6:
        l6.instance()
        _expect_pullback(l6, e.pullback_square, "Φ(pEŨ), φ, φ̃_E, pEŨ′ is not a pullback")
    with CheckRecorder("2015.04.10.l7", "φ̃∘ω′ = Φ(ω)∘φ̃_E", max_instances) as l7:
        l7.instance()
        l7.expect(data.setup.tilde_square_commutes(), "φ̃∘ω′ differs from Φ(ω)∘φ̃_E")
    return [l4.result(), l6.result(), l7.result()]


def check_ucfunctor(F: UnivCatFunctor, bound: int, data: Optional[JFunctorData] = None,
                    max_instances: Optional[int] = None) -> List[CheckResult]:
    """Structural clauses, then Eq/Ω/Jp compatibility and the EŨ functor when J-data is supplied."""
    results = check_structure(F, bound, max_instances)
    if data is None:
        return results
    compatibility = check_compatibility(data, max_instances)
    results.extend(compatibility)
    if compatibility[0].passed:
        results.extend(check_e_functor(data, max_instances))
    else:
        for check_id in ("2015.04.06.l4", "2015.04.06.l6", "2015.04.10.l7"):
            results.append(skipped_result(check_id, "φ̃_E squares", "not compatible with Eq and Eq′"))
    return results


def check_phi2_square(setup: TwoUniverseSetup, bound: int, max_instances: Optional[int] = None) -> CheckResult:
    """D^{g′}∘Φ₂² = Φ₁²∘D^g on D_{p2}(X,V)."""
    objects = _test_objects(bound)
    with CheckRecorder("2015.04.08.l1", "Φ² commutes with D^g", max_instances) as rec:
        for X in objects:
            for V in objects:
                for d in d_p_elements(setup.second.source, X, V):
                    rec.instance()
                    rec.expect(setup.d_g_prime(setup.second.phi2(d)) == setup.first.phi2(setup.d_g(d)),
                               "D^g′(Φ₂²(d)) differs from Φ₁²(D^g(d))", d=d)
    return rec.result()


def check_chi(setup: TwoUniverseSetup, bound: int, max_instances: Optional[int] = None) -> CheckResult:
    """
    χ_2(V)∘I^{g′}(Φ(V)) = Φ(I^g(V))∘χ_1(V), and η′(Φ²(η⁻¹(a))) = Φ(a)∘χ(V)
    for every a: Y → I_p(V) with Y small.
    """
    first = setup.first
    values = [first.source.base, first.source.total]
    with CheckRecorder("2015.04.06.l7", "χ is natural in the universe", max_instances) as rec:
        for V in values:
            rec.instance()
            rec.expect(setup.second.chi(V).then(setup.i_g_prime(first.ob(V))) ==
                       first.ar(setup.i_g(V)).then(first.chi(V)),
                       "χ_2(V)∘I^g′ differs from Φ(I^g(V))∘χ_1(V)", V=V)
            for functor in (setup.first, setup.second):
                hom = functor.source_lcc.i_p(functor.source.p, V)
                chi = functor.chi(V)
                for Y in _test_objects(bound):
                    for a in FINSET.hom(Y, hom.obj):
                        rec.instance()
                        rec.expect(functor.transport(a, V) == functor.ar(a).then(chi),
                                   "η′(Φ²(η⁻¹(a))) differs from Φ(a)∘χ", functor=functor.name, a=a)
    return rec.result()


def check_faces(setup: TwoUniverseSetup, check_id: str = "2015.04.10.th3",
                max_instances: Optional[int] = None) -> CheckResult:
    """The quadruple (ζ̃_2, ζ̃_1, ζ_2, ζ_1) is a morphism of squares."""
    with CheckRecorder(check_id, "ζ, ζ̃ form a morphism from the Φ-image of the I-square", max_instances) as rec:
        rec.instance()
        rec.expect(setup.tilde_square_commutes(), "φ̃1∘g′ differs from Φ(g)∘φ̃2")
        for face, (lhs, rhs) in setup.faces().items():
            rec.instance()
            rec.expect(lhs == rhs, f"{face} face does not commute", face=face)
        rec.note(FACE_LABEL_NOTE)
    return rec.result()


def identity_setup(F: UnivCatFunctor) -> TwoUniverseSetup:
    """(p, p, Id_Ũ) with g′ = Id_Ũ′."""
    return TwoUniverseSetup(F, F, Mor.identity(F.source.total), Mor.identity(F.target.total))


def check_two_universe(data: JFunctorData, bound: int, max_instances: Optional[int] = None) -> List[CheckResult]:
    """Lemmas 2015.04.08.l1 and 2015.04.06.l7, the comparison theorem and its ω instance."""
    setup = data.setup
    results = [
        check_phi2_square(setup, bound, max_instances),
        check_chi(setup, bound, max_instances),
        check_faces(identity_setup(data.base), "2015.04.10.th3", max_instances),
    ]
    with CheckRecorder("2015.04.10.th1", "ξ, ξ̃, ζ, ζ̃ form a morphism of the Fp squares", max_instances) as rec:
        rec.instance()
        faces = setup.faces()
        for face, (lhs, rhs) in faces.items():
            rec.instance()
            rec.expect(lhs == rhs, f"{face} face does not commute", face=face)
        rec.note(FACE_LABEL_NOTE)
    results.append(rec.result())
    return results


def check_h(h: InducedHomomorphism, bound: int, max_instances: Optional[int] = None) -> List[CheckResult]:
    """H(Φ) is a homomorphism, ψ_Γ are isomorphisms and ψ_Γ∘Φ(p_{Γ,n}) = p_{H(Γ),n}∘ψ_{ft^n Γ}."""
    source, target = h.source, h.target
    results = [check_homomorphism(h.homomorphism, bound, max_instances=max_instances)]
    with CheckRecorder("2015.05.10.l1", "ψ commutes with the projections p_(Γ,n)", max_instances) as rec:
        objects = source.objects(bound)
        images = set()
        for gamma in objects:
            rec.instance()
            psi = h.psi(gamma)
            images.add(h.ob(gamma))
            if not rec.expect(psi.is_bijective(), "ψ_Γ is not an isomorphism", object=gamma):
                continue
            for n in range(gamma.length + 1):
                rec.instance()
                lhs = psi.then(h.functor.ar(source.proj_n(gamma, n).mor))
                rhs = target.proj_n(h.ob(gamma), n).mor.then(h.psi(source.ft_n(gamma, n)))
                rec.expect(lhs == rhs, "ψ_Γ∘Φ(p_(Γ,n)) differs from p_(H(Γ),n)∘ψ", object=gamma, n=n)
        if len(images) < len(objects):
            rec.note(f"H identifies {len(objects) - len(images)} objects of length ≤ {bound}")
    results.append(rec.result())
    return results


def check_d_element_identities(data: JFunctorData, h: InducedHomomorphism, bundle: JBundleC, bound: int,
                               max_instances: Optional[int] = None) -> CheckResult:
    """(u1′(H T), u1′(H P)) and (u1′(H T), ũ1′(H o)) are the ψ_Γ-transports of Φ_E²."""
    cc, cc_prime = h.source, h.target
    e, target_e = data.e, data.target.e
    with CheckRecorder("2015.05.06.l3", "H acts on D_pE elements through Φ_E² and ψ", max_instances) as rec:
        for gamma in cc.objects(max(bound - 1, 0)):
            psi = h.psi(gamma)
            for T in cc.extensions(gamma):
                F = cc.u1(T)
                moved_T = h.ob(T)
                for P in cc.extensions(idx_t(cc, bundle.idt, T)):
                    rec.instance()
                    expected = d_p_act(target_e, psi, d_p_post(e.phi2(DpElement(F, cc.u1(P))), data.base.phi))
                    rec.expect(DpElement(moved_T.last, h.ob(P).last) == expected,
                               "(u1′(H T), u1′(H P)) differs from the transported pair", T=T, P=P)
                    for o in cc.sections(P):
                        rec.instance()
                        expected = d_p_act(
                            target_e, psi, d_p_post(e.phi2(DpElement(F, cc.u1_tilde(o))), data.base.phi_tilde)
                        )
                        actual = DpElement(moved_T.last, cc_prime.u1_tilde(h.homomorphism.section(o)))
                        rec.expect(actual == expected, "(u1′(H T), ũ1′(H o)) differs from the transported pair", o=o)
    return rec.result()


def check_h_j_compat(data: JFunctorData, bound: int, source_cc: Optional[UniverseCSystem] = None,
                     target_cc: Optional[UniverseCSystem] = None,
                     max_instances: Optional[int] = None) -> List[CheckResult]:
    """
    Compatibility first; when it holds, H(Φ) preserves IdT, refl and J between the transferred bundles.
    """
    results = check_compatibility(data, max_instances)
    descriptions = {
        H_J_LABELS["j0"]: "H(Φ) preserves the J0-structures",
        H_J_LABELS["j1"]: "H(Φ) preserves the J1-structures",
        H_J_LABELS["j2"]: "H(Φ) preserves the J2-structures",
        "2015.05.06.l3": "H acts on D_pE elements through Φ_E² and ψ",
    }
    failed = [r.check_id for r in results if r.failed]
    if failed:
        logger.info(f"{data.base.name}: compatibility failed ({', '.join(failed)}); homomorphism checks skipped")
        for check_id, description in descriptions.items():
            results.append(skipped_result(check_id, description, f"compatibility failed: {', '.join(failed)}"))
        return results
    h = h_of(data.base, source_cc, target_cc)
    source_bundle = transfer_bundle(h.source, data.source, data.source_jp)
    target_bundle = transfer_bundle(h.target, data.target, data.target_jp)
    results.extend(check_hom_j(h.homomorphism, source_bundle, target_bundle, bound, labels=H_J_LABELS,
                               max_instances=max_instances))
    results.append(check_d_element_identities(data, h, source_bundle, bound, max_instances))
    return results
