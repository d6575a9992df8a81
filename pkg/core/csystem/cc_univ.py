"""
The C-system CC(C,p) of a universe category, its functor int, and the bijections u1, ũ1.

Objects are sequences (F_1,...,F_n) with F_{k+1}: int(F_1,...,F_k) → U; morphisms are
finite-set morphisms between the int objects, tagged with the two CC objects.
"""
import itertools
import threading
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Iterator, List, Optional, Tuple

from loguru import logger

from core.category.fincat import FINSET, FinSet, Mor, PT
from core.csystem.csystem import CSystem, Section
from core.exceptions import CSystemError
from core.universe.universe import UniverseStructure
from core.verification.report import CheckRecorder, CheckResult


@dataclass(frozen=True)
class CCObject:
    entries: Tuple[Mor, ...] = ()

    @property
    def length(self) -> int:
        return len(self.entries)

    @property
    def parent(self) -> "CCObject":
        return CCObject(self.entries[:-1])

    @property
    def last(self) -> Mor:
        return self.entries[-1]

    def extend(self, F: Mor) -> "CCObject":
        return CCObject(self.entries + (F,))

    def __repr__(self) -> str:
        return "CCObject(" + ", ".join(f"{F.dom.label}->{F.cod.label}" for F in self.entries) + ")"

    def describe(self) -> List[Any]:
        return [F.describe() for F in self.entries]


@dataclass(frozen=True)
class CCMor:
    """A morphism Γ → Γ′ of CC(C,p): a morphism int(Γ) → int(Γ′)."""

    dom: CCObject
    cod: CCObject
    mor: Mor

    def then(self, other: "CCMor") -> "CCMor":
        if self.cod != other.dom:
            raise CSystemError(f"cannot compose {self.dom!r}->{self.cod!r} with {other.dom!r}->{other.cod!r}")
        return CCMor(self.dom, other.cod, self.mor.then(other.mor))

    def describe(self) -> Dict[str, Any]:
        return {"dom": self.dom.length, "cod": self.cod.length, "table": self.mor.describe()["table"]}


PT_OBJECT = CCObject(())


class UniverseCSystem(CSystem):
    """
    CC(C,p) for a universe in finite sets.

    Features:
    - int memoized per object
    - q(f,int(Γ,F)) = Q(f,F) and p_(Γ,F) = p_(int Γ,F) by construction
    - u1, ũ1 and their inverses
    - Chooser-independent encodings of elements, objects, morphisms and sections
    """

    def __init__(self, universe: UniverseStructure, name: Optional[str] = None):
        self.universe = universe
        self.name = name or f"CC({universe.name})"
        self._ints: Dict[CCObject, FinSet] = {PT_OBJECT: PT}
        self._objects: Dict[int, List[CCObject]] = {}
        self._encodings: Dict[CCObject, Dict[Hashable, Hashable]] = {}
        self._lock = threading.Lock()

    def int_obj(self, gamma: CCObject) -> FinSet:
        value = self._ints.get(gamma)
        if value is None:
            parent = self.int_obj(gamma.parent)
            if gamma.last.dom != parent or gamma.last.cod != self.universe.base:
                raise CSystemError(f"{gamma!r}: last entry is not a morphism int(ft Γ) → U")
            value = self.universe.ext(gamma.last).apex
            with self._lock:
                self._ints[gamma] = value
        return value

    def make_object(self, entries) -> CCObject:
        gamma = CCObject(tuple(entries))
        self.int_obj(gamma)
        return gamma

    def pt(self) -> CCObject:
        return PT_OBJECT

    def length(self, gamma: CCObject) -> int:
        return gamma.length

    def ft(self, gamma: CCObject) -> CCObject:
        if gamma.length == 0:
            return gamma
        return gamma.parent

    def proj(self, gamma: CCObject) -> CCMor:
        if gamma.length == 0:
            raise CSystemError("pt has no canonical projection")
        self.int_obj(gamma)
        return CCMor(gamma, gamma.parent, self.universe.ext(gamma.last).proj)

    def base_change(self, f: CCMor, gamma: CCObject) -> CCObject:
        if gamma.length == 0 or f.cod != gamma.parent:
            raise CSystemError("base change needs f: Γ′ → ft(Γ)")
        return f.dom.extend(f.mor.then(gamma.last))

    def q(self, f: CCMor, gamma: CCObject) -> CCMor:
        changed = self.base_change(f, gamma)
        return CCMor(changed, gamma, self.universe.q_of(f.mor, gamma.last))

    def q_pair(self, g: CCMor, gamma: CCObject, a: CCMor, b: CCMor) -> CCMor:
        target = self.base_change(g, gamma)
        if a.cod != g.dom or b.cod != gamma or a.dom != b.dom:
            raise CSystemError("pairing cone does not match the q-square")
        F = gamma.last
        m = self.universe.pair(g.mor.then(F), a.mor, b.mor.then(self.universe.ext(F).q))
        return CCMor(a.dom, target, m)

    def identity(self, gamma: CCObject) -> CCMor:
        return CCMor(gamma, gamma, Mor.identity(self.int_obj(gamma)))

    def compose(self, f: CCMor, g: CCMor) -> CCMor:
        return f.then(g)

    def dom(self, f: CCMor) -> CCObject:
        return f.dom

    def cod(self, f: CCMor) -> CCObject:
        return f.cod

    def objects(self, bound: int) -> List[CCObject]:
        """Every object of length ≤ bound, by length and then by canonical order of the entries."""
        result: List[CCObject] = []
        layer = [PT_OBJECT]
        for length in range(bound + 1):
            cached = self._objects.get(length)
            if cached is None:
                if length == 0:
                    cached = [PT_OBJECT]
                else:
                    cached = [
                        gamma.extend(F)
                        for gamma in layer
                        for F in FINSET.hom(self.int_obj(gamma), self.universe.base)
                    ]
                    for gamma in cached:
                        self.int_obj(gamma)
                with self._lock:
                    self._objects[length] = cached
            result.extend(cached)
            layer = cached
        logger.debug(f"{self.name}: {len(result)} objects of length ≤ {bound}")
        return result

    def objects_of_length(self, length: int) -> List[CCObject]:
        return [gamma for gamma in self.objects(length) if gamma.length == length]

    def extensions(self, gamma: CCObject) -> List[CCObject]:
        """Ob_1(Γ)."""
        return [gamma.extend(F) for F in FINSET.hom(self.int_obj(gamma), self.universe.base)]

    def hom(self, a: CCObject, b: CCObject) -> Iterator[CCMor]:
        for m in FINSET.hom(self.int_obj(a), self.int_obj(b)):
            yield CCMor(a, b, m)

    def sections(self, gamma: CCObject) -> Iterator[Section]:
        if gamma.length == 0:
            return
        base = self.int_obj(gamma.parent)
        proj = self.universe.ext(gamma.last).proj
        fibers = [proj.fiber(x) for x in base.elements]
        for table in itertools.product(*fibers):
            yield Section(gamma, CCMor(gamma.parent, gamma, Mor(base, proj.dom, table, check=False)))

    def realize(self, f: CCMor) -> Mor:
        return f.mor

    def u1(self, T: CCObject) -> Mor:
        """u1: Ob_1(Γ) → Hom(int Γ, U)."""
        if T.length == 0:
            raise CSystemError("u1 is defined on objects of positive length")
        return T.last

    def u1_inv(self, gamma: CCObject, F: Mor) -> CCObject:
        if F.dom != self.int_obj(gamma) or F.cod != self.universe.base:
            raise CSystemError(f"{F!r} is not a morphism int(Γ) → U")
        return gamma.extend(F)

    def u1_tilde(self, s: Section) -> Mor:
        """ũ1(s) = s∘Q(u1(∂s)): int(ft ∂s) → Ũ."""
        return s.mor.mor.then(self.universe.ext(self.u1(s.target)).q)

    def u1_tilde_inv(self, gamma: CCObject, o: Mor) -> Section:
        """The section of (Γ, o∘p) determined by o: int(Γ) → Ũ."""
        if o.dom != self.int_obj(gamma) or o.cod != self.universe.total:
            raise CSystemError(f"{o!r} is not a morphism int(Γ) → Ũ")
        F = o.then(self.universe.p)
        m = self.universe.pair(F, Mor.identity(o.dom), o)
        return Section(gamma.extend(F), CCMor(gamma, gamma.extend(F), m))

    def encode_element(self, gamma: CCObject, y: Hashable) -> Hashable:
        """Chooser-independent name of y ∈ int(Γ): the tuple of its Ũ-coordinates."""
        table = self._encoding(gamma)
        return table[y]

    def _encoding(self, gamma: CCObject) -> Dict[Hashable, Hashable]:
        table = self._encodings.get(gamma)
        if table is None:
            if gamma.length == 0:
                table = {"*": ()}
            else:
                parent = self._encoding(gamma.parent)
                square = self.universe.ext(gamma.last)
                table = {y: parent[square.proj(y)] + (square.q(y),) for y in square.apex.elements}
            with self._lock:
                self._encodings[gamma] = table
        return table

    def encode_object(self, gamma: CCObject) -> Tuple:
        encoded = []
        prefix = PT_OBJECT
        for F in gamma.entries:
            codes = self._encoding(prefix)
            encoded.append(tuple(sorted(((codes[x], F(x)) for x in F.dom.elements), key=repr)))
            prefix = prefix.extend(F)
        return tuple(encoded)

    def encode_mor(self, f: CCMor) -> Tuple:
        source, target = self._encoding(f.dom), self._encoding(f.cod)
        return tuple(sorted(((source[x], target[y]) for x, y in f.mor.items()), key=repr))

    def encode_section(self, s: Section) -> Tuple:
        return (self.encode_object(s.target), self.encode_mor(s.mor))


def build_cc(universe: UniverseStructure, name: Optional[str] = None) -> UniverseCSystem:
    return UniverseCSystem(universe, name)


def check_q_equation(cc: UniverseCSystem, bound: int, source_bound: int = 1,
                     max_instances: Optional[int] = None) -> CheckResult:
    """q(f, int(Γ,F)) = Q(f,F) and int(f*(Γ,F)) = (int Γ′; f∘F)."""
    with CheckRecorder("2015.04.02.eq2", "q(f,(Γ,F)) = Q(f,F)", max_instances) as rec:
        objects = cc.objects(bound)
        sources = [gamma for gamma in objects if gamma.length <= source_bound]
        for T in objects:
            if T.length == 0:
                continue
            for source in sources:
                for f in cc.hom(source, T.parent):
                    rec.instance()
                    changed = cc.base_change(f, T)
                    rec.expect(cc.int_obj(changed) == cc.universe.ext(f.mor.then(T.last)).apex,
                               "int(f*(Γ,F)) differs from (int Γ′; f∘F)", f=f, object=T)
                    rec.expect(cc.q(f, T).mor == cc.universe.q_of(f.mor, T.last), "q(f,(Γ,F)) differs from Q(f,F)",
                               f=f, object=T)
    return rec.result()


def check_u1(cc: UniverseCSystem, bound: int, max_instances: Optional[int] = None) -> CheckResult:
    """u1 and ũ1 are bijections, with ũ1(s)∘p = u1(∂s)."""
    p = cc.universe.p
    with CheckRecorder("2015.03.31.eq5", "u1, ũ1 bijections and ũ1(s)∘p = u1(∂s)", max_instances) as rec:
        for gamma in cc.objects(max(bound - 1, 0)):
            base = cc.int_obj(gamma)
            extensions = cc.extensions(gamma)
            rec.expect(len(extensions) == FINSET.hom_size(base, cc.universe.base),
                       "Ob_1(Γ) and Hom(int Γ, U) differ in size", object=gamma)
            for T in extensions:
                rec.instance()
                rec.expect(cc.u1_inv(gamma, cc.u1(T)) == T, "u1⁻¹(u1(T)) differs from T", object=T)
                for s in cc.sections(T):
                    rec.instance()
                    o = cc.u1_tilde(s)
                    rec.expect(o.then(p) == cc.u1(s.target), "ũ1(s)∘p differs from u1(∂s)", section=s)
                    rec.expect(cc.u1_tilde_inv(gamma, o) == s, "ũ1⁻¹(ũ1(s)) differs from s", section=s)
            for o in FINSET.hom(base, cc.universe.total):
                rec.instance()
                s = cc.u1_tilde_inv(gamma, o)
                rec.expect(cc.is_section(s), "ũ1⁻¹(o) is not a section", o=o)
                rec.expect(cc.u1_tilde(s) == o, "ũ1(ũ1⁻¹(o)) differs from o", o=o)
    return rec.result()


def check_u1_naturality(cc: UniverseCSystem, bound: int, max_instances: Optional[int] = None) -> CheckResult:
    """u1(f*(T)) = f∘u1(T) and ũ1(f*(s)) = f∘ũ1(s) for f: Γ′ → Γ."""
    with CheckRecorder("cc_univ.naturality", "u1 and ũ1 are natural under base change", max_instances) as rec:
        objects = [gamma for gamma in cc.objects(bound) if gamma.length < bound] or [PT_OBJECT]
        for gamma, source in itertools.product(objects, repeat=2):
            for f in cc.hom(source, gamma):
                for T in cc.extensions(gamma):
                    rec.instance()
                    changed = cc.pullback_object(f, T, 1)
                    rec.expect(cc.u1(changed) == f.mor.then(cc.u1(T)), "u1(f*T) differs from f∘u1(T)", f=f, object=T)
                    for s in cc.sections(T):
                        rec.instance()
                        rec.expect(cc.u1_tilde(cc.pullback_section(f, s, 1)) == f.mor.then(cc.u1_tilde(s)),
                                   "ũ1(f*s) differs from f∘ũ1(s)", f=f, section=s)
    return rec.result()


def object_counts(cc: UniverseCSystem, bound: int) -> Dict[int, int]:
    """Number of objects per length, up to ``bound``."""
    counts: Dict[int, int] = {}
    for gamma in cc.objects(bound):
        counts[gamma.length] = counts.get(gamma.length, 0) + 1
    return counts
