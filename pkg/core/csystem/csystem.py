"""
The C-system interface with its derived operations and the axiom checker.

Derived operations (iterated projections, s_f, δ(T), iterated base change of objects,
sections and morphisms) are written once against the interface, using only ft, p_Γ,
f*(Γ), q(f,Γ) and pairing into q-squares.
"""
import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Iterator, List, Optional

from loguru import logger

from config.settings import CSYSTEM_SOURCE_BOUND
from core.category.fincat import CommSquare, Mor, verify_pullback
from core.exceptions import CSystemError, FormalError
from core.verification.report import CheckRecorder, CheckResult


@dataclass(frozen=True)
class Section:
    """An element s of Õb(Γ): a morphism ft(Γ) → Γ with s∘p_Γ = id; ∂(s) = Γ."""

    target: Any
    mor: Any

    @property
    def boundary(self) -> Any:
        return self.target

    def describe(self):
        describe = getattr(self.mor, "describe", None)
        return {"boundary": repr(self.target), "mor": describe() if callable(describe) else repr(self.mor)}


class CSystem(ABC):
    """
    Abstract C-system.

    Subclasses provide the primitive structure; everything else is derived here.
    """

    name = "C-system"

    @abstractmethod
    def pt(self) -> Any:
        pass

    @abstractmethod
    def length(self, gamma: Any) -> int:
        pass

    @abstractmethod
    def ft(self, gamma: Any) -> Any:
        pass

    @abstractmethod
    def proj(self, gamma: Any) -> Any:
        """p_Γ: Γ → ft(Γ)."""

    @abstractmethod
    def base_change(self, f: Any, gamma: Any) -> Any:
        """f*(Γ) for f: Γ′ → ft(Γ)."""

    @abstractmethod
    def q(self, f: Any, gamma: Any) -> Any:
        """q(f,Γ): f*(Γ) → Γ."""

    @abstractmethod
    def q_pair(self, g: Any, gamma: Any, a: Any, b: Any) -> Any:
        """The unique m: W → g*(Γ) with m∘p_{g*(Γ)} = a and m∘q(g,Γ) = b."""

    @abstractmethod
    def identity(self, gamma: Any) -> Any:
        pass

    @abstractmethod
    def compose(self, f: Any, g: Any) -> Any:
        pass

    @abstractmethod
    def dom(self, f: Any) -> Any:
        pass

    @abstractmethod
    def cod(self, f: Any) -> Any:
        pass

    @abstractmethod
    def objects(self, bound: int) -> List[Any]:
        """Every object of length ≤ bound, in canonical order."""

    @abstractmethod
    def hom(self, a: Any, b: Any) -> Iterator[Any]:
        pass

    @abstractmethod
    def sections(self, gamma: Any) -> Iterator[Section]:
        """Õb(Γ) in canonical order."""

    def realize(self, f: Any) -> Optional[Mor]:
        """The underlying finite-set morphism under int, when the C-system has one."""
        return None

    def extensions(self, gamma: Any) -> List[Any]:
        """Ob_1(Γ)."""
        length = self.length(gamma) + 1
        return [x for x in self.objects(length) if self.length(x) == length and self.ft(x) == gamma]

    def ft_n(self, gamma: Any, n: int) -> Any:
        if n > self.length(gamma):
            raise CSystemError(f"ft^{n} undefined on an object of length {self.length(gamma)}")
        for _ in range(n):
            gamma = self.ft(gamma)
        return gamma

    def proj_n(self, gamma: Any, n: int) -> Any:
        """p_{Γ,n}: Γ → ft^n(Γ); p_{Γ,0} = id."""
        if n > self.length(gamma):
            raise CSystemError(f"p_(Γ,{n}) undefined on an object of length {self.length(gamma)}")
        result = self.identity(gamma)
        current = gamma
        for _ in range(n):
            result = self.compose(result, self.proj(current))
            current = self.ft(current)
        return result

    def is_section(self, s: Section) -> bool:
        if self.length(s.target) < 1:
            return False
        if self.dom(s.mor) != self.ft(s.target) or self.cod(s.mor) != s.target:
            return False
        return self.compose(s.mor, self.proj(s.target)) == self.identity(self.ft(s.target))

    def s_of(self, f: Any) -> Section:
        """s_f: Δ → (f∘p_Γ)*(Γ) for f: Δ → Γ with l(Γ) ≥ 1."""
        gamma = self.cod(f)
        if self.length(gamma) < 1:
            raise CSystemError("s_f needs a codomain of positive length")
        g = self.compose(f, self.proj(gamma))
        mor = self.q_pair(g, gamma, self.identity(self.dom(f)), f)
        return Section(self.base_change(g, gamma), mor)

    def delta(self, T: Any) -> Section:
        """δ(T) = s_{Id_T}, a section of p_T*(T)."""
        return self.s_of(self.identity(T))

    def depth(self, X: Any, gamma: Any) -> int:
        i = self.length(X) - self.length(gamma)
        if i < 0 or self.ft_n(X, i) != gamma:
            raise CSystemError("object does not lie over the given base")
        return i

    def q_n(self, f: Any, X: Any, i: int) -> Any:
        """q(f,X,i): f*(X,i) → X, with q(f,X,0) = f."""
        if i == 0:
            if self.cod(f) != X:
                raise CSystemError("depth mismatch: base change along a morphism into another object")
            return f
        return self.q(self.q_n(f, self.ft(X), i - 1), X)

    def pullback_object(self, f: Any, X: Any, i: int) -> Any:
        """f*(X,i) for f: Γ′ → Γ and ft^i(X) = Γ."""
        if self.length(X) < i or self.ft_n(X, i) != self.cod(f):
            raise CSystemError(f"depth mismatch: object is not of depth {i} over the codomain")
        if i == 0:
            return self.dom(f)
        return self.base_change(self.q_n(f, self.ft(X), i - 1), X)

    def pullback_section(self, f: Any, s: Section, i: int) -> Section:
        """f*(s,i) for a section s with ∂(s) of depth i ≥ 1 over cod(f)."""
        X = s.target
        if i < 1:
            raise CSystemError("sections pull back along depth at least 1")
        if self.length(X) < i or self.ft_n(X, i) != self.cod(f):
            raise CSystemError(f"depth mismatch: section boundary is not of depth {i} over the codomain")
        g = self.q_n(f, self.ft(X), i - 1)
        return self.s_of(self.compose(g, s.mor))

    def pullback_morphism(self, f: Any, h: Any, j: int, i: int) -> Any:
        """
        f*(h): f*(Y,j) → f*(X,i) for h: Y → X over cod(f), where Y and X have depths j and i.

        Raises:
            CSystemError: if h is not over the base or depths do not match
        """
        Y, X = self.dom(h), self.cod(h)
        if self.ft_n(Y, j) != self.cod(f) or self.ft_n(X, i) != self.cod(f):
            raise CSystemError("depth mismatch in base change of a morphism")
        if self.compose(h, self.proj_n(X, i)) != self.proj_n(Y, j):
            raise CSystemError("morphism is not over the base")
        if i == 0:
            return self.proj_n(self.pullback_object(f, Y, j), j)
        a = self.pullback_morphism(f, self.compose(h, self.proj(X)), j, i - 1)
        b = self.compose(self.q_n(f, Y, j), h)
        return self.q_pair(self.q_n(f, self.ft(X), i - 1), X, a, b)


class CorruptedCSystem(CSystem):
    """
    Delegates to ``inner`` except that ft of ``victim`` is replaced by ``wrong_parent``.
    Used to exercise the axiom checker on a structure that is not a C-system.
    """

    def __init__(self, inner: CSystem, victim: Any, wrong_parent: Any):
        self.inner = inner
        self.victim = victim
        self.wrong_parent = wrong_parent
        self.name = f"corrupted {inner.name}"

    def pt(self):
        return self.inner.pt()

    def length(self, gamma):
        return self.inner.length(gamma)

    def ft(self, gamma):
        if gamma == self.victim:
            return self.wrong_parent
        return self.inner.ft(gamma)

    def proj(self, gamma):
        return self.inner.proj(gamma)

    def base_change(self, f, gamma):
        return self.inner.base_change(f, gamma)

    def q(self, f, gamma):
        return self.inner.q(f, gamma)

    def q_pair(self, g, gamma, a, b):
        return self.inner.q_pair(g, gamma, a, b)

    def identity(self, gamma):
        return self.inner.identity(gamma)

    def compose(self, f, g):
        return self.inner.compose(f, g)

    def dom(self, f):
        return self.inner.dom(f)

    def cod(self, f):
        return self.inner.cod(f)

    def objects(self, bound):
        return self.inner.objects(bound)

    def hom(self, a, b):
        return self.inner.hom(a, b)

    def sections(self, gamma):
        return self.inner.sections(gamma)

    def realize(self, f):
        return self.inner.realize(f)


def check_csystem_axioms(cs: CSystem, bound: int, source_bound: Optional[int] = None,
                         max_instances: Optional[int] = None) -> CheckResult:
    """
    Check the C-system axioms for objects of length ≤ ``bound``.

    Substitutions f: Γ′ → ft(Γ) range over sources Γ′ of length ≤ ``source_bound``.

    Returns:
        CheckResult with every violated instance
    """
    source_bound = CSYSTEM_SOURCE_BOUND if source_bound is None else source_bound
    with CheckRecorder("csystem.axioms", f"C-system axioms of {cs.name} at length ≤ {bound}", max_instances) as rec:
        objects = cs.objects(bound)
        sources = [obj for obj in objects if cs.length(obj) <= source_bound]
        pt = cs.pt()
        rec.expect(cs.length(pt) == 0, "pt does not have length 0")
        rec.expect([obj for obj in objects if cs.length(obj) == 0] == [pt], "pt is not the only object of length 0")

        for gamma in objects:
            if cs.length(gamma) == 0:
                continue
            rec.instance()
            parent = cs.ft(gamma)
            if not rec.expect(cs.length(parent) == cs.length(gamma) - 1, "l(ft Γ) differs from l(Γ) - 1",
                              object=gamma):
                continue
            p_gamma = cs.proj(gamma)
            rec.expect(cs.dom(p_gamma) == gamma and cs.cod(p_gamma) == parent, "p_Γ is not Γ → ft(Γ)",
                       object=gamma)
            rec.expect(cs.compose(cs.identity(gamma), p_gamma) == p_gamma
                       and cs.compose(p_gamma, cs.identity(parent)) == p_gamma,
                       "unit laws fail on p_Γ", object=gamma)

            identity_change = cs.base_change(cs.identity(parent), gamma)
            rec.expect(identity_change == gamma, "id*(Γ) differs from Γ", object=gamma)
            rec.expect(cs.q(cs.identity(parent), gamma) == cs.identity(gamma), "q(id,Γ) is not the identity",
                       object=gamma)

            delta = cs.delta(gamma)
            rec.expect(cs.is_section(delta), "δ(T) is not a section", object=gamma)
            rec.expect(cs.compose(delta.mor, cs.q(p_gamma, gamma)) == cs.identity(gamma),
                       "δ(T)∘q(p_T,T) is not the identity", object=gamma)

            for source in sources:
                for f in cs.hom(source, parent):
                    rec.instance()
                    changed = cs.base_change(f, gamma)
                    q_f = cs.q(f, gamma)
                    rec.expect(cs.ft(changed) == source, "ft(f*(Γ)) differs from the source", f=f, object=gamma)
                    rec.expect(cs.length(changed) == cs.length(source) + 1, "l(f*(Γ)) is wrong", f=f,
                               object=gamma)
                    rec.expect(cs.dom(q_f) == changed and cs.cod(q_f) == gamma, "q(f,Γ) has wrong endpoints",
                               f=f, object=gamma)
                    rec.expect(cs.compose(q_f, p_gamma) == cs.compose(cs.proj(changed), f),
                               "q(f,Γ)∘p_Γ differs from p_(f*Γ)∘f", f=f, object=gamma)
                    square = _realized_q_square(cs, f, gamma, q_f, changed)
                    if square is not None:
                        rec.expect(verify_pullback(square), "q-square is not a pullback", f=f, object=gamma)
                    for source2 in sources:
                        for g in cs.hom(source2, source):
                            rec.instance()
                            gf = cs.compose(g, f)
                            rec.expect(cs.base_change(gf, gamma) == cs.base_change(g, changed),
                                       "(g∘f)*(Γ) differs from g*(f*(Γ))", f=f, g=g, object=gamma)
                            rec.expect(cs.q(gf, gamma) == cs.compose(cs.q(g, changed), q_f),
                                       "q(g∘f,Γ) differs from q(g,f*Γ)∘q(f,Γ)", f=f, g=g, object=gamma)
    result = rec.result()
    logger.debug(f"C-system axioms for {cs.name}: {result.status.value} ({result.instances} instances)")
    return result


def _realized_q_square(cs: CSystem, f: Any, gamma: Any, q_f: Any, changed: Any) -> Optional[CommSquare]:
    parts = [cs.realize(m) for m in (q_f, cs.proj(changed), cs.proj(gamma), f)]
    if any(part is None for part in parts):
        return None
    return CommSquare(top=parts[0], left=parts[1], right=parts[2], bottom=parts[3])


@dataclass(frozen=True)
class CSystemHomomorphism:
    """Object and morphism assignments between two C-systems."""

    source: CSystem
    target: CSystem
    on_objects: Callable[[Any], Any]
    on_morphisms: Callable[[Any], Any]
    name: str = "H"

    @classmethod
    def identity(cls, cs: CSystem) -> "CSystemHomomorphism":
        return cls(cs, cs, lambda gamma: gamma, lambda f: f, name="Id")

    def ob(self, gamma: Any) -> Any:
        return self.on_objects(gamma)

    def ar(self, f: Any) -> Any:
        return self.on_morphisms(f)

    def section(self, s: Section) -> Section:
        return Section(self.ob(s.target), self.ar(s.mor))


def check_homomorphism(h: CSystemHomomorphism, bound: int, source_bound: Optional[int] = None,
                       max_instances: Optional[int] = None) -> CheckResult:
    """Preservation of l, ft, pt, p_Γ, base change, q, composition and sections."""
    source, target = h.source, h.target
    source_bound = CSYSTEM_SOURCE_BOUND if source_bound is None else source_bound
    with CheckRecorder("csystem.homomorphism", f"{h.name} is a homomorphism of C-systems", max_instances) as rec:
        rec.expect(h.ob(source.pt()) == target.pt(), "pt is not preserved")
        objects = source.objects(bound)
        for gamma in objects:
            rec.instance()
            image = h.ob(gamma)
            rec.expect(target.length(image) == source.length(gamma), "length not preserved", object=gamma)
            rec.expect(h.ar(source.identity(gamma)) == target.identity(image), "identity not preserved",
                       object=gamma)
            if source.length(gamma) == 0:
                continue
            rec.expect(target.ft(image) == h.ob(source.ft(gamma)), "ft not preserved", object=gamma)
            rec.expect(h.ar(source.proj(gamma)) == target.proj(image), "p_Γ not preserved", object=gamma)
            for s in source.sections(gamma):
                rec.instance()
                rec.expect(target.is_section(h.section(s)), "image of a section is not a section", section=s)
            parent = source.ft(gamma)
            for src in objects:
                if source.length(src) > source_bound:
                    continue
                for f in source.hom(src, parent):
                    rec.instance()
                    try:
                        rec.expect(h.ob(source.base_change(f, gamma)) == target.base_change(h.ar(f), image),
                                   "base change not preserved", f=f, object=gamma)
                        rec.expect(h.ar(source.q(f, gamma)) == target.q(h.ar(f), image),
                                   "q not preserved", f=f, object=gamma)
                    except FormalError as e:
                        rec.violation(f"raised {type(e).__name__}: {e}", f=f, object=gamma)
        small = [o for o in objects if source.length(o) <= source_bound]
        for a, b, c in itertools.product(small, repeat=3):
            for f in source.hom(a, b):
                for g in source.hom(b, c):
                    rec.instance()
                    rec.expect(h.ar(source.compose(f, g)) == target.compose(h.ar(f), h.ar(g)),
                               "composition not preserved", f=f, g=g)
    return rec.result()
