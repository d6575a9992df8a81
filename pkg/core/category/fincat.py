"""
Finite sets, functions between them, finite categories and pullback verification.

Composition is diagrammatic everywhere: ``f.then(g)`` (also ``f >> g``) is f followed by g,
written f∘g in formulas.
"""
import itertools
import threading
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from config.settings import CATEGORY_PROBE_SIZE, MAX_SET_SIZE, PULLBACK_PROBE_SIZE
from core.exceptions import (
    CompositionError,
    MaterializationError,
    MorphismError,
    NonCommutingSquareError,
    PullbackError,
)
from core.verification.report import CheckRecorder, CheckResult


def canonical_key(value: Any) -> Tuple:
    """Total order on element encodings: integers, then strings, then tuples, then the rest."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, tuple(canonical_key(item) for item in value))
    return (3, repr(value))


class FinSet:
    """
    A finite set of hashable element encodings in canonical order.

    Equality is equality of the element sets; ``name`` is a display label only.
    """

    __slots__ = ("elements", "name", "_index", "_hash")

    def __init__(self, elements: Iterable[Hashable] = (), name: str = ""):
        ordered = tuple(sorted(set(elements), key=canonical_key))
        self.elements = ordered
        self.name = name
        self._index = {x: i for i, x in enumerate(ordered)}
        self._hash = hash(ordered)

    @classmethod
    def materialize(cls, elements: Iterable[Hashable], name: str, limit: Optional[int] = None) -> "FinSet":
        """Build a constructed set, failing loudly when it would exceed the materialization cap."""
        pool = set(elements)
        cap = MAX_SET_SIZE if limit is None else limit
        if len(pool) > cap:
            raise MaterializationError(f"construction {name} would have {len(pool)} elements; cap is {cap}")
        return cls(pool, name)

    @classmethod
    def skeletal(cls, size: int) -> "FinSet":
        return cls(range(size), name=str(size))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.elements)

    def __contains__(self, x: Hashable) -> bool:
        return x in self._index

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinSet):
            return NotImplemented
        return self._hash == other._hash and self.elements == other.elements

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FinSet({self.label})"

    @property
    def label(self) -> str:
        return f"{self.name or 'set'}[{len(self.elements)}]"

    def index(self, x: Hashable) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise MorphismError(f"{x!r} is not an element of {self.label}") from None

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "size": len(self.elements), "elements": list(self.elements)}


PT = FinSet(("*",), name="pt")


class Mor:
    """
    A function between finite sets, stored as the tuple of images in the domain's order.

    Equality is structural: same domain, codomain and table.
    """

    __slots__ = ("dom", "cod", "table", "_hash")

    def __init__(self, dom: FinSet, cod: FinSet, table: Iterable[Hashable], check: bool = True):
        table = tuple(table)
        if len(table) != len(dom):
            raise MorphismError(f"table of length {len(table)} for domain {dom.label}")
        if check:
            for y in table:
                if y not in cod._index:
                    raise MorphismError(f"image {y!r} is not in codomain {cod.label}")
        self.dom = dom
        self.cod = cod
        self.table = table
        self._hash = hash((dom._hash, cod._hash, table))

    @classmethod
    def from_function(cls, dom: FinSet, cod: FinSet, fn: Callable[[Hashable], Hashable]) -> "Mor":
        return cls(dom, cod, (fn(x) for x in dom.elements))

    @classmethod
    def from_mapping(cls, dom: FinSet, cod: FinSet, mapping: Dict[Hashable, Hashable]) -> "Mor":
        try:
            return cls(dom, cod, (mapping[x] for x in dom.elements))
        except KeyError as e:
            raise MorphismError(f"mapping has no image for {e.args[0]!r}") from None

    @classmethod
    def identity(cls, obj: FinSet) -> "Mor":
        return cls(obj, obj, obj.elements, check=False)

    @classmethod
    def constant(cls, dom: FinSet, cod: FinSet, value: Hashable) -> "Mor":
        return cls(dom, cod, (value for _ in dom.elements))

    @classmethod
    def inclusion(cls, sub: FinSet, sup: FinSet) -> "Mor":
        return cls(sub, sup, sub.elements)

    def __call__(self, x: Hashable) -> Hashable:
        return self.table[self.dom.index(x)]

    def then(self, other: "Mor") -> "Mor":
        if self.cod != other.dom:
            raise CompositionError(
                f"cannot compose {self.dom.label}->{self.cod.label} with {other.dom.label}->{other.cod.label}"
            )
        images = other.table
        position = other.dom._index
        return Mor(self.dom, other.cod, (images[position[y]] for y in self.table), check=False)

    __rshift__ = then

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Mor):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.table == other.table
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Mor({self.dom.label}->{self.cod.label})"

    def items(self) -> Iterator[Tuple[Hashable, Hashable]]:
        return zip(self.dom.elements, self.table)

    def as_dict(self) -> Dict[Hashable, Hashable]:
        return dict(self.items())

    def fiber(self, y: Hashable) -> Tuple[Hashable, ...]:
        return tuple(x for x, image in self.items() if image == y)

    def image(self) -> FinSet:
        return FinSet(self.table)

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.table == self.dom.elements

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == len(self.cod)

    def is_bijective(self) -> bool:
        return len(self.dom) == len(self.cod) and self.is_injective()

    def inverse(self) -> "Mor":
        if not self.is_bijective():
            raise MorphismError(f"{self!r} is not invertible")
        return Mor.from_mapping(self.cod, self.dom, {y: x for x, y in self.items()})

    def describe(self) -> Dict[str, Any]:
        return {
            "dom": self.dom.label,
            "cod": self.cod.label,
            "table": [[x, y] for x, y in self.items()],
        }


class FinCategory(ABC):
    """
    A finite, or boundedly enumerable, category with decidable equality.

    ``objects`` is the exhaustive enumerator used by verifiers; constructions never call it.
    """

    name = "category"

    @abstractmethod
    def objects(self, bound: Optional[int] = None) -> List[Any]:
        """First ``bound`` objects of the exhaustive enumerator (all of them when None)."""

    @abstractmethod
    def hom(self, a: Any, b: Any) -> Iterator[Any]:
        pass

    @abstractmethod
    def identity(self, a: Any) -> Any:
        pass

    @abstractmethod
    def compose(self, f: Any, g: Any) -> Any:
        """f then g; raises CompositionError unless cod(f) = dom(g)."""

    def probe_objects(self) -> List[Any]:
        return self.objects()


class FinSetCategory(FinCategory):
    """
    The category of finite sets, enumerated through skeletal sets and registered objects.

    Features:
    - Skeletal sets {0..n-1} for n up to the probe size
    - Extra objects registered by fixtures (pt, U, Ũ, ...)
    - Hom-sets enumerated lazily in canonical order
    """

    name = "FinSet"

    def __init__(self, extra_objects: Sequence[FinSet] = (), probe_size: Optional[int] = None):
        self.probe_size = CATEGORY_PROBE_SIZE if probe_size is None else probe_size
        enumerated: List[FinSet] = []
        for obj in [FinSet.skeletal(n) for n in range(self.probe_size + 1)] + [PT] + list(extra_objects):
            if obj not in enumerated:
                enumerated.append(obj)
        self._objects = enumerated

    def with_objects(self, *objects: FinSet) -> "FinSetCategory":
        return FinSetCategory(list(self._objects) + list(objects), probe_size=self.probe_size)

    def objects(self, bound: Optional[int] = None) -> List[FinSet]:
        return list(self._objects if bound is None else self._objects[:bound])

    def hom(self, a: FinSet, b: FinSet) -> Iterator[Mor]:
        for table in itertools.product(b.elements, repeat=len(a)):
            yield Mor(a, b, table, check=False)

    @staticmethod
    def hom_size(a: FinSet, b: FinSet) -> int:
        return len(b) ** len(a)

    def identity(self, a: FinSet) -> Mor:
        return Mor.identity(a)

    def compose(self, f: Mor, g: Mor) -> Mor:
        return f.then(g)

    def probe_objects(self) -> List[FinSet]:
        return [FinSet.skeletal(n) for n in range(PULLBACK_PROBE_SIZE + 1)]

    @staticmethod
    def terminal() -> FinSet:
        return PT

    @staticmethod
    def to_terminal(obj: FinSet) -> Mor:
        return Mor.constant(obj, PT, "*")


FINSET = FinSetCategory()


@dataclass(frozen=True)
class Arrow:
    name: str
    dom: str
    cod: str


class TableCategory(FinCategory):
    """A category given by explicit object, arrow and composition tables."""

    name = "table"

    def __init__(
        self,
        objects: Sequence[str],
        arrows: Sequence[Arrow],
        composition: Dict[Tuple[str, str], str],
        identities: Dict[str, str],
    ):
        self._objects = list(objects)
        self._arrows = {arrow.name: arrow for arrow in arrows}
        self._composition = dict(composition)
        self._identities = dict(identities)

    def objects(self, bound: Optional[int] = None) -> List[str]:
        return list(self._objects if bound is None else self._objects[:bound])

    def hom(self, a: str, b: str) -> Iterator[Arrow]:
        return iter([arrow for arrow in self._arrows.values() if arrow.dom == a and arrow.cod == b])

    def identity(self, a: str) -> Arrow:
        return self._arrows[self._identities[a]]

    def compose(self, f: Arrow, g: Arrow) -> Arrow:
        if f.cod != g.dom:
            raise CompositionError(f"cannot compose {f.name}: {f.dom}->{f.cod} with {g.name}: {g.dom}->{g.cod}")
        try:
            return self._arrows[self._composition[(f.name, g.name)]]
        except KeyError:
            raise CompositionError(f"composition table has no entry for ({f.name}, {g.name})") from None


def check_category_axioms(category: FinCategory, bound: Optional[int] = None,
                          max_instances: Optional[int] = None) -> CheckResult:
    """
    Check unit laws, associativity and the composability rule by enumeration.

    Args:
        category: Category exposing an exhaustive object enumerator
        bound: Number of enumerated objects to use (all when None)
        max_instances: Instance budget; the result is flagged incomplete beyond it

    Returns:
        CheckResult listing every violated instance
    """
    with CheckRecorder("fincat.axioms", "unit laws and associativity", max_instances) as rec:
        objs = category.objects(bound)
        homs = {(a, b): list(category.hom(a, b)) for a in objs for b in objs}

        for (a, b), arrows in homs.items():
            id_a = category.identity(a)
            id_b = category.identity(b)
            for f in arrows:
                rec.instance()
                rec.expect(category.compose(id_a, f) == f, "left unit law fails", morphism=f)
                rec.expect(category.compose(f, id_b) == f, "right unit law fails", morphism=f)

        for a, b in itertools.permutations(objs, 2):
            incoming = next(iter(homs[(b, b)]), None) if (b, b) in homs else None
            outgoing = next(iter(homs[(a, a)]), None)
            if incoming is None or outgoing is None:
                continue
            rec.instance()
            try:
                category.compose(incoming, outgoing)
                rec.violation("composition defined on a non-composable pair", first=incoming, second=outgoing)
            except CompositionError:
                pass

        for b, c in itertools.product(objs, repeat=2):
            if not homs[(b, c)]:
                continue
            for d in objs:
                tails = {(g, h): category.compose(g, h) for g in homs[(b, c)] for h in homs[(c, d)]}
                if not tails:
                    continue
                for a in objs:
                    for f in homs[(a, b)]:
                        heads = {g: category.compose(f, g) for g in homs[(b, c)]}
                        for (g, h), gh in tails.items():
                            rec.instance()
                            left = category.compose(heads[g], h)
                            right = category.compose(f, gh)
                            if left != right:
                                rec.violation("associativity fails", f=f, g=g, h=h)
    result = rec.result()
    logger.debug(f"category axioms on {category.name}: {result.status.value} after {result.instances} instances")
    return result


def is_final(category: FinCategory, x: Any, bound: Optional[int] = None) -> bool:
    for obj in category.objects(bound):
        count = 0
        for _ in category.hom(obj, x):
            count += 1
            if count > 1:
                return False
        if count != 1:
            return False
    return True


@dataclass(frozen=True)
class CommSquare:
    """
    A square of morphisms::

        apex --top--> E
         |left        |right
         v            v
         B' -bottom-> B
    """

    top: Any
    left: Any
    right: Any
    bottom: Any

    def __post_init__(self):
        if self.top.dom != self.left.dom or self.top.cod != self.right.dom:
            raise MorphismError("square edges do not share the apex or the upper right corner")
        if self.left.cod != self.bottom.dom or self.right.cod != self.bottom.cod:
            raise MorphismError("square edges do not meet at the lower corners")

    @property
    def apex(self) -> Any:
        return self.top.dom

    def commutes(self, category: FinCategory = FINSET) -> bool:
        return category.compose(self.top, self.right) == category.compose(self.left, self.bottom)


def verify_pullback(square: CommSquare, category: FinCategory = FINSET,
                    probes: Optional[Sequence[Any]] = None) -> bool:
    """
    Decide the pullback property by cone enumeration over probe objects.

    Raises:
        NonCommutingSquareError: if the square does not commute
    """
    if not square.commutes(category):
        raise NonCommutingSquareError(f"square with apex {square.apex!r} does not commute")
    compose = category.compose
    for probe in (category.probe_objects() if probes is None else probes):
        mediators = Counter(
            (compose(m, square.left), compose(m, square.top)) for m in category.hom(probe, square.apex)
        )
        for u in category.hom(probe, square.bottom.dom):
            target = compose(u, square.bottom)
            for v in category.hom(probe, square.right.dom):
                if compose(v, square.right) == target and mediators.get((u, v), 0) != 1:
                    return False
    return True


def is_set_pullback(square: CommSquare) -> bool:
    """Direct oracle: the apex maps bijectively onto the subset of the product over the base."""
    if not square.commutes():
        raise NonCommutingSquareError(f"square with apex {square.apex!r} does not commute")
    expected = {
        (b, e)
        for b in square.bottom.dom.elements
        for e in square.right.dom.elements
        if square.bottom(b) == square.right(e)
    }
    actual = [(square.left(a), square.top(a)) for a in square.apex.elements]
    return len(actual) == len(set(actual)) and set(actual) == expected


_MISSING = object()
_AMBIGUOUS = object()


def _index_legs(left: Mor, top: Mor) -> Dict[Tuple[Hashable, Hashable], Any]:
    index: Dict[Tuple[Hashable, Hashable], Any] = {}
    for a, l, t in zip(left.dom.elements, left.table, top.table):
        index[(l, t)] = _AMBIGUOUS if (l, t) in index else a
    return index


class LegIndex:
    """Apex lookups by (left, top) values, memoized per pair of legs."""

    def __init__(self):
        self._indexes: Dict[Tuple[Mor, Mor], Dict[Tuple[Hashable, Hashable], Any]] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._indexes)

    def lookup(self, left: Mor, top: Mor) -> Dict[Tuple[Hashable, Hashable], Any]:
        index = self._indexes.get((left, top))
        if index is None:
            index = _index_legs(left, top)
            with self._lock:
                index = self._indexes.setdefault((left, top), index)
        return index


def mediate(left: Mor, top: Mor, u: Mor, v: Mor, legs: Optional[LegIndex] = None) -> Mor:
    """
    The morphism m with m∘left = u and m∘top = v into the apex of a pullback with legs left, top.

    Raises:
        PullbackError: if some cone point has no mediating element or several
    """
    if u.dom != v.dom or u.cod != left.cod or v.cod != top.cod:
        raise PullbackError(f"cone {u!r}, {v!r} does not match legs {left!r}, {top!r}")
    index = legs.lookup(left, top) if legs is not None else _index_legs(left, top)
    table = []
    for l, t in zip(u.table, v.table):
        a = index.get((l, t), _MISSING)
        if a is _MISSING:
            raise PullbackError(f"no element of {left.dom.label} over ({l!r}, {t!r})")
        if a is _AMBIGUOUS:
            raise PullbackError(f"several elements of {left.dom.label} over ({l!r}, {t!r})")
        table.append(a)
    return Mor(u.dom, left.dom, table, check=False)


@dataclass(frozen=True)
class FunctorData:
    """Object and morphism assignments of a functor between enumerable categories."""

    source: FinCategory
    target: FinCategory
    on_objects: Callable[[Any], Any]
    on_morphisms: Callable[[Any], Any]
    name: str = "F"

    @classmethod
    def identity(cls, category: FinCategory = FINSET) -> "FunctorData":
        return cls(category, category, lambda x: x, lambda f: f, name="Id")

    def ob(self, x: Any) -> Any:
        return self.on_objects(x)

    def ar(self, f: Any) -> Any:
        return self.on_morphisms(f)

    def square(self, square: CommSquare) -> CommSquare:
        return CommSquare(self.ar(square.top), self.ar(square.left), self.ar(square.right), self.ar(square.bottom))


def check_functor(functor: FunctorData, bound: Optional[int] = None,
                  squares: Sequence[CommSquare] = (), max_instances: Optional[int] = None) -> CheckResult:
    """Identity, endpoint and composition preservation; optionally pullback preservation."""
    source, target = functor.source, functor.target
    with CheckRecorder("fincat.functor", f"functor laws for {functor.name}", max_instances) as rec:
        objs = source.objects(bound)
        homs = {(a, b): list(source.hom(a, b)) for a in objs for b in objs}
        for a in objs:
            rec.instance()
            rec.expect(functor.ar(source.identity(a)) == target.identity(functor.ob(a)),
                       "identity not preserved", object=a)
        images = {}
        for (a, b), arrows in homs.items():
            for f in arrows:
                rec.instance()
                image = functor.ar(f)
                images[f] = image
                rec.expect(image.dom == functor.ob(a) and image.cod == functor.ob(b),
                           "endpoints not preserved", morphism=f, image=image)
        for a, b, c in itertools.product(objs, repeat=3):
            for f in homs[(a, b)]:
                for g in homs[(b, c)]:
                    rec.instance()
                    try:
                        preserved = functor.ar(source.compose(f, g)) == target.compose(images[f], images[g])
                    except CompositionError:
                        preserved = False
                    rec.expect(preserved, "composition not preserved", f=f, g=g)
        for square in squares:
            rec.instance()
            try:
                rec.expect(verify_pullback(functor.square(square), target),
                           "image of a designated square is not a pullback", apex=square.apex)
            except NonCommutingSquareError as e:
                rec.violation(f"image of a designated square does not commute: {e}", apex=square.apex)
    return rec.result()
