"""
Universe structures: a morphism p: Ũ→U with a chosen pullback square for every F: X→U.

The derived operations (pairing f*g, Q(f,F), F*(f), Δ) are defined from the chosen squares
only, so they are correct for any chooser, including ones where (U;Id_U) is not Ũ.
"""
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.category.fincat import (
    FINSET,
    CommSquare,
    FinSet,
    FinSetCategory,
    LegIndex,
    Mor,
    PT,
    is_set_pullback,
    mediate,
    verify_pullback,
)
from core.category.lcc import FinSetLCC
from core.exceptions import NonCommutingSquareError, PullbackError, UniverseError
from core.verification.report import CheckRecorder, CheckResult
from utils.helpers import stable_digest


@dataclass(frozen=True)
class CanonicalSquare:
    """
    The chosen square for F: X→U::

        (X;F) --Q(F)--> Ũ
          |p_{X,F}      |p
          v             v
          X  ----F----> U
    """

    F: Mor
    apex: FinSet
    q: Mor
    proj: Mor
    p: Mor

    @property
    def square(self) -> CommSquare:
        return CommSquare(top=self.q, left=self.proj, right=self.p, bottom=self.F)


def morphism_key(f: Mor) -> Tuple:
    """Run-independent encoding of a morphism, used to seed choosers."""
    return (f.dom.elements, f.cod.elements, f.table)


class Chooser(ABC):
    """Chooses the apex and legs of the pullback of p along F."""

    name = "chooser"

    @abstractmethod
    def choose(self, p: Mor, F: Mor) -> Tuple[FinSet, Mor, Mor]:
        """Returns (apex, p_{X,F}, Q(F))."""


class NormalizedChooser(Chooser):
    """Apex {(x,u) : F(x) = p(u)} with the two coordinate projections."""

    name = "normalized"

    def choose(self, p: Mor, F: Mor) -> Tuple[FinSet, Mor, Mor]:
        by_code: Dict[Hashable, List[Hashable]] = {}
        for u, code in p.items():
            by_code.setdefault(code, []).append(u)
        apex = FinSet.materialize(
            ((x, u) for x, code in F.items() for u in by_code.get(code, ())),
            f"({F.dom.name or 'X'};F)",
        )
        proj = Mor(apex, F.dom, (a[0] for a in apex.elements), check=False)
        q = Mor(apex, p.dom, (a[1] for a in apex.elements), check=False)
        return apex, proj, q


class SkewedChooser(NormalizedChooser):
    """
    The normalized apex with both legs precomposed with a seeded permutation.

    The permutation depends only on (seed, F) and moves at least one element of every
    apex with two or more elements; seed 0 is the normalized chooser.
    """

    name = "skewed"

    def __init__(self, seed: int):
        self.seed = seed

    def permutation(self, size: int, F: Mor) -> np.ndarray:
        if self.seed == 0 or size < 2:
            return np.arange(size)
        digest = stable_digest((self.seed, morphism_key(F)))
        rng = np.random.default_rng(int(digest[:16], 16))
        sigma = rng.permutation(size)
        if np.array_equal(sigma, np.arange(size)):
            sigma = np.roll(sigma, 1)
        return sigma

    def choose(self, p: Mor, F: Mor) -> Tuple[FinSet, Mor, Mor]:
        apex, proj, q = super().choose(p, F)
        sigma = self.permutation(len(apex), F)
        twisted = [apex.elements[int(i)] for i in sigma]
        proj = Mor(apex, F.dom, (a[0] for a in twisted), check=False)
        q = Mor(apex, p.dom, (a[1] for a in twisted), check=False)
        return apex, proj, q


class UniverseStructure:
    """
    A universe p: Ũ→U in finite sets with memoized chosen squares.

    Features:
    - ext(F): the chosen square for F, identical on every call
    - pair(F, f, g) = f*g, Q(f,F), F*(f) and Δ from the chosen squares
    - Thread-safe memoization
    """

    def __init__(self, p: Mor, chooser: Optional[Chooser] = None, name: str = "p"):
        self.p = p
        self.base = p.cod
        self.total = p.dom
        self.chooser = chooser or NormalizedChooser()
        self.name = name
        self._squares: Dict[Mor, CanonicalSquare] = {}
        self._legs = LegIndex()
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"UniverseStructure({self.name}: {self.total.label}->{self.base.label}, {self.chooser.name})"

    def _choose(self, F: Mor) -> CanonicalSquare:
        apex, proj, q = self.chooser.choose(self.p, F)
        return CanonicalSquare(F, apex, q, proj, self.p)

    def ext(self, F: Mor) -> CanonicalSquare:
        if F.cod != self.base:
            raise UniverseError(f"{F!r} does not land in {self.base.label}")
        square = self._squares.get(F)
        if square is None:
            square = self._choose(F)
            with self._lock:
                square = self._squares.setdefault(F, square)
        return square

    def pair(self, F: Mor, f: Mor, g: Mor) -> Mor:
        """f*g: W → (X;F), the unique morphism with (f*g)∘p_{X,F} = f and (f*g)∘Q(F) = g."""
        if f.cod != F.dom or g.cod != self.total:
            raise UniverseError(f"cone {f!r}, {g!r} does not match {F!r}")
        if f.then(F) != g.then(self.p):
            raise UniverseError("cone f∘F = g∘p does not commute")
        square = self.ext(F)
        try:
            return mediate(square.proj, square.q, f, g, self._legs)
        except PullbackError as e:
            raise UniverseError(f"chosen square for {F!r} is not a pullback: {e}") from None

    def q_of(self, f: Mor, F: Mor) -> Mor:
        """Q(f,F) = (p_{X′,f∘F}∘f)*Q(f∘F): (X′;f∘F) → (X;F)."""
        if f.cod != F.dom:
            raise UniverseError(f"{f!r} does not land in the domain of {F!r}")
        restricted = self.ext(f.then(F))
        return self.pair(F, restricted.proj.then(f), restricted.q)

    def star(self, F: Mor, f: Mor, source: "UniverseStructure") -> Mor:
        """F*(f): (X;F)′ → (X;F) for f: Ũ′ → Ũ over U, primes referring to ``source``."""
        if f.dom != source.total or f.cod != self.total or f.then(self.p) != source.p:
            raise UniverseError(f"{f!r} is not a morphism over U from {source.name} to {self.name}")
        primed = source.ext(F)
        return self.pair(F, primed.proj, primed.q.then(f))

    def delta(self) -> Mor:
        """Δ = Id*Id: Ũ → (Ũ;p)."""
        identity = Mor.identity(self.total)
        return self.pair(self.p, identity, identity)

    def squares(self) -> List[CanonicalSquare]:
        with self._lock:
            return list(self._squares.values())

    def is_normalized_at(self, F: Mor) -> bool:
        apex, proj, q = NormalizedChooser().choose(self.p, F)
        square = self.ext(F)
        return square.proj == proj and square.q == q

    def with_chooser(self, chooser: Chooser) -> "UniverseStructure":
        return UniverseStructure(self.p, chooser, self.name)


class EUniverse(UniverseStructure):
    """
    The universe pEŨ: EŨ = (Ũ;p,Eq) → U built from p and Eq: (Ũ;p)→U.

    Its chosen squares concatenate three squares of the base structure:
    (X;F)_E = (X;F,Q(F)∘p,Q(Q(F),p)∘Eq) and Q(F)_E = Q(Q(Q(F),p),Eq).
    """

    def __init__(self, base: UniverseStructure, Eq: Mor):
        self.base_universe = base
        self.first = base.ext(base.p)
        if Eq.dom != self.first.apex or Eq.cod != base.base:
            raise UniverseError(f"Eq must be a morphism ({self.first.apex.label}) → {base.base.label}, got {Eq!r}")
        self.Eq = Eq
        self.second = base.ext(Eq)
        p_e = self.second.proj.then(self.first.proj).then(base.p)
        super().__init__(p_e, base.chooser, name=f"{base.name}E")

    def __repr__(self) -> str:
        return f"EUniverse(over {self.base_universe!r}, |EŨ|={len(self.total)})"

    def _choose(self, F: Mor) -> CanonicalSquare:
        base = self.base_universe
        first = base.ext(F)
        second = base.ext(first.q.then(base.p))
        qq = base.q_of(first.q, base.p)
        third = base.ext(qq.then(self.Eq))
        q_e = base.q_of(qq, self.Eq)
        proj = third.proj.then(second.proj).then(first.proj)
        logger.debug(f"E-square for {F!r}: apex {third.apex.label}")
        return CanonicalSquare(F, third.apex, q_e, proj, self.p)

    def coordinates(self, e: Hashable) -> Tuple[Hashable, Hashable, Hashable]:
        """(ũ1, ũ2, ũ3) of an element of EŨ, read through the legs of (Ũ;p) and (Ũ;p,Eq)."""
        pair = self.second.proj(e)
        return self.first.proj(pair), self.first.q(pair), self.second.q(e)

    def components(self, F: Mor) -> Dict[str, Mor]:
        """
        The component formulas of the E-square for F, element by element.

        Q(F)_E sends z to the element of EŨ whose coordinates are the Q-legs of the three
        stacked base squares at z; the pairing Q(f,F) is never used for it.
        """
        base = self.base_universe
        first = base.ext(F)
        second = base.ext(first.q.then(base.p))
        third = base.ext(base.q_of(first.q, base.p).then(self.Eq))
        by_coordinates = {self.coordinates(e): e for e in self.total}
        table = []
        for z in third.apex:
            y = third.proj(z)
            key = (first.q(second.proj(y)), second.q(y), third.q(z))
            if key not in by_coordinates:
                raise UniverseError(f"no element of {self.total.label} with coordinates {key!r}")
            table.append(by_coordinates[key])
        return {
            "q": Mor(third.apex, self.total, table),
            "proj": third.proj.then(second.proj).then(first.proj),
        }


@dataclass
class UniverseCategory:
    """
    A universe category in finite sets: the universe, its chosen LCC structure and an
    object enumerator with U and Ũ registered.
    """

    name: str
    universe: UniverseStructure
    lcc: FinSetLCC = field(default_factory=FinSetLCC)
    category: Optional[FinSetCategory] = None

    def __post_init__(self):
        if self.category is None:
            self.category = FINSET.with_objects(self.universe.base, self.universe.total)

    @property
    def p(self) -> Mor:
        return self.universe.p

    @property
    def base(self) -> FinSet:
        return self.universe.base

    @property
    def total(self) -> FinSet:
        return self.universe.total

    def small_objects(self, max_size: int = 2) -> List[FinSet]:
        """Skeletal sets up to ``max_size`` plus pt, the test objects for LCC and universe checks."""
        objects = [FinSet.skeletal(n) for n in range(max_size + 1)]
        return objects + [PT]

    def points(self) -> List[Mor]:
        """Every F: pt → U."""
        return list(FINSET.hom(PT, self.base))

    def with_chooser(self, chooser: Chooser) -> "UniverseCategory":
        return UniverseCategory(f"{self.name}/{chooser.name}", self.universe.with_chooser(chooser),
                                FinSetLCC(self.lcc.max_set_size))


def fixture_morphisms(universe: UniverseStructure, objects: Sequence[FinSet]) -> List[Mor]:
    """Every F: X → U for X in ``objects``, in canonical order."""
    return [F for X in objects for F in FINSET.hom(X, universe.base)]


def check_chosen_squares(universe: UniverseStructure, morphisms: Sequence[Mor], check_id: str = "universe.squares",
                         max_instances: Optional[int] = None) -> CheckResult:
    """Every chosen square commutes, passes verify_pullback and agrees with the set-theoretic oracle."""
    with CheckRecorder(check_id, f"chosen squares of {universe.name} are pullbacks", max_instances) as rec:
        for F in morphisms:
            rec.instance()
            square = universe.ext(F).square
            try:
                by_cones = verify_pullback(square)
                rec.expect(by_cones, "chosen square is not a pullback", F=F)
                rec.expect(by_cones == is_set_pullback(square), "cone enumeration disagrees with the oracle", F=F)
            except NonCommutingSquareError as e:
                rec.violation(str(e), F=F)
    return rec.result()


def check_q_laws(universe: UniverseStructure, objects: Sequence[FinSet],
                 max_instances: Optional[int] = None) -> CheckResult:
    """Defining equations of pairing and Q(f,F), the Q-squares as pullbacks and the two composition laws."""
    base = universe.base
    with CheckRecorder("universe.q_laws", f"pairing and Q(-,-) laws of {universe.name}", max_instances) as rec:
        for X in objects:
            for F in FINSET.hom(X, base):
                square = universe.ext(F)
                rec.instance()
                rec.expect(universe.pair(F, square.proj, square.q) == Mor.identity(square.apex),
                           "p_{X,F}*Q(F) is not the identity", F=F)
                for X1 in objects:
                    for f in FINSET.hom(X1, X):
                        rec.instance()
                        q = universe.q_of(f, F)
                        restricted = universe.ext(f.then(F))
                        rec.expect(q.then(square.q) == restricted.q, "Q(f,F)∘Q(F) differs from Q(f∘F)", f=f, F=F)
                        rec.expect(q.then(square.proj) == restricted.proj.then(f),
                                   "Q(f,F)∘p_{X,F} differs from p∘f", f=f, F=F)
                        rec.expect(verify_pullback(CommSquare(q, restricted.proj, square.proj, f)),
                                   "Q(f,F) square is not a pullback", f=f, F=F)
                        for X2 in objects:
                            for g in FINSET.hom(X2, X1):
                                rec.instance()
                                rec.expect(
                                    universe.q_of(g, f.then(F)).then(q) == universe.q_of(g.then(f), F),
                                    "Q(g,f∘F)∘Q(f,F) differs from Q(g∘f,F)", g=g, f=f, F=F)
    return rec.result()


def check_delta(universe: UniverseStructure) -> CheckResult:
    with CheckRecorder("universe.delta", "Δ∘p_{Ũ,p} = Id and Δ∘Q(p) = Id") as rec:
        rec.instance()
        delta = universe.delta()
        square = universe.ext(universe.p)
        identity = Mor.identity(universe.total)
        rec.expect(delta.then(square.proj) == identity, "Δ∘p_{Ũ,p} is not the identity")
        rec.expect(delta.then(square.q) == identity, "Δ∘Q(p) is not the identity")
    return rec.result()


def check_star_square(universe: UniverseStructure, source: UniverseStructure, f: Mor, objects: Sequence[FinSet],
                      max_instances: Optional[int] = None) -> CheckResult:
    """
    F*(f) satisfies its defining equations and Q′(g,F)∘F*(f) = (g∘F)*(f)∘Q(g,F)
    for every X′ → X → U.
    """
    with CheckRecorder("2015.04.20.l1", "base change F*(f) commutes with Q(g,F)", max_instances) as rec:
        for X in objects:
            for F in FINSET.hom(X, universe.base):
                star = universe.star(F, f, source)
                rec.instance()
                rec.expect(star.then(universe.ext(F).q) == source.ext(F).q.then(f),
                           "F*(f)∘Q(F) differs from Q′(F)∘f", F=F)
                rec.expect(star.then(universe.ext(F).proj) == source.ext(F).proj,
                           "F*(f)∘p_{X,F} differs from p′_{X,F}", F=F)
                for X1 in objects:
                    for g in FINSET.hom(X1, X):
                        rec.instance()
                        left = source.q_of(g, F).then(star)
                        right = universe.star(g.then(F), f, source).then(universe.q_of(g, F))
                        rec.expect(left == right, "Q′(g,F)∘F*(f) differs from (g∘F)*(f)∘Q(g,F)", g=g, F=F)
    return rec.result()


def check_e_universe(e: EUniverse, objects: Sequence[FinSet], max_instances: Optional[int] = None) -> CheckResult:
    """The concatenated squares are pullbacks and match the explicit component formulas."""
    with CheckRecorder("2015.05.08.constr1", "chosen squares of the pEŨ universe", max_instances) as rec:
        for X in objects:
            for F in FINSET.hom(X, e.base):
                rec.instance()
                square = e.ext(F)
                components = e.components(F)
                rec.expect(square.q == components["q"], "Q(F)_E differs from Q(Q(Q(F),p),Eq)", F=F)
                rec.expect(square.proj == components["proj"], "p^E_{X,F} differs from the projection composite", F=F)
                try:
                    rec.expect(verify_pullback(square.square), "E-square is not a pullback", F=F)
                except NonCommutingSquareError as e_:
                    rec.violation(str(e_), F=F)
    return rec.result()


def differs_from_normalized(universe: UniverseStructure, morphisms: Sequence[Mor]) -> List[Mor]:
    """Keys whose chosen square is not the normalized one."""
    return [F for F in morphisms if not universe.is_normalized_at(F)]
