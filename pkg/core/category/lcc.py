"""
Chosen locally cartesian closed structure on finite sets.

Fiber products are subsets of products, slice Homs are sets of dependent function
tables. Universe-dependent pieces (D_p, η, η!) take the universe structure as an
argument; only ``ext``, ``pair``, ``q_of`` and ``star`` are used from it.
"""
import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterator, Optional, Sequence, Tuple

from loguru import logger

from config.settings import MAX_SEARCH_RESULTS, MAX_SET_SIZE
from core.category.fincat import FINSET, CommSquare, FinSet, Mor, mediate
from core.exceptions import LCCError, MaterializationError
from core.verification.report import CheckRecorder, CheckResult


@dataclass(frozen=True)
class FiberProductChoice:
    """(B′,f)×_B(E,p) with elements (b′, e)."""

    f: Mor
    p: Mor
    apex: FinSet
    pr1: Mor
    pr2: Mor

    @property
    def diamond(self) -> Mor:
        """f⋄p, the projection to the common base."""
        return self.pr1.then(self.f)

    @property
    def square(self) -> CommSquare:
        return CommSquare(top=self.pr2, left=self.pr1, right=self.p, bottom=self.f)

    def pair(self, u: Mor, v: Mor) -> Mor:
        if u.dom != v.dom or u.cod != self.f.dom or v.cod != self.p.dom:
            raise LCCError(f"cone {u!r}, {v!r} does not match the cospan of {self.apex.label}")
        if u.then(self.f) != v.then(self.p):
            raise LCCError(f"cone into {self.apex.label} does not commute")
        return Mor(u.dom, self.apex, zip(u.table, v.table), check=False)


@dataclass(frozen=True)
class SliceHomChoice:
    """
    Hom_U((E,p),(F,q)) with elements (a, images), images listed along the sorted fiber p⁻¹(a).
    """

    source: Mor
    target: Mor
    obj: FinSet
    proj: Mor
    ev: Mor
    evaluation_domain: FiberProductChoice
    fibers: Dict[Hashable, Tuple[Hashable, ...]] = field(compare=False, hash=False)

    @property
    def base(self) -> FinSet:
        return self.source.cod

    def fiber_over(self, a: Hashable) -> Tuple[Hashable, ...]:
        return tuple(h for h in self.obj.elements if h[0] == a)


@dataclass(frozen=True)
class DpElement:
    """An element (F, a) of D_p(X,V): F: X→U and a: (X;F)→V."""

    F: Mor
    a: Mor

    def describe(self) -> Dict[str, Any]:
        return {"F": self.F.describe(), "a": self.a.describe()}


class FinSetLCC:
    """
    Chosen fiber products and slice Homs in finite sets.

    Features:
    - Memoized fiber products, products and slice Homs
    - adj / adj_inv currying bijection over a base
    - The functor I_p and the comparison morphisms I^h
    """

    def __init__(self, max_set_size: Optional[int] = None):
        self.max_set_size = MAX_SET_SIZE if max_set_size is None else max_set_size
        self._fiber_products: Dict[Tuple[Mor, Mor], FiberProductChoice] = {}
        self._slice_homs: Dict[Tuple[Mor, Mor], SliceHomChoice] = {}
        self._lock = threading.Lock()

    def fiber_product(self, f: Mor, p: Mor) -> FiberProductChoice:
        key = (f, p)
        choice = self._fiber_products.get(key)
        if choice is not None:
            return choice
        if f.cod != p.cod:
            raise LCCError(f"cospan codomains differ: {f.cod.label} and {p.cod.label}")
        by_base: Dict[Hashable, list] = {}
        for e, b in p.items():
            by_base.setdefault(b, []).append(e)
        pairs = [(x, e) for x, b in f.items() for e in by_base.get(b, ())]
        apex = FinSet.materialize(pairs, f"({f.dom.name or 'B'}x{p.dom.name or 'E'})", self.max_set_size)
        choice = FiberProductChoice(
            f=f,
            p=p,
            apex=apex,
            pr1=Mor(apex, f.dom, (pair[0] for pair in apex.elements), check=False),
            pr2=Mor(apex, p.dom, (pair[1] for pair in apex.elements), check=False),
        )
        with self._lock:
            return self._fiber_products.setdefault(key, choice)

    def product(self, a: FinSet, b: FinSet) -> FiberProductChoice:
        return self.fiber_product(FINSET.to_terminal(a), FINSET.to_terminal(b))

    def times(self, source: FiberProductChoice, target: FiberProductChoice, g: Mor, h: Mor) -> Mor:
        """g ×_B h between fiber products over a common base."""
        if g.dom != source.f.dom or h.dom != source.p.dom or g.cod != target.f.dom or h.cod != target.p.dom:
            raise LCCError("factor morphisms do not match the fiber products")
        return target.pair(source.pr1.then(g), source.pr2.then(h))

    def slice_hom(self, p: Mor, q: Mor) -> SliceHomChoice:
        key = (p, q)
        choice = self._slice_homs.get(key)
        if choice is not None:
            return choice
        if p.cod != q.cod:
            raise LCCError(f"objects over different bases: {p.cod.label} and {q.cod.label}")
        base = p.cod
        fibers = {a: tuple(e for e in p.dom.elements if p(e) == a) for a in base.elements}
        targets = {a: tuple(y for y in q.dom.elements if q(y) == a) for a in base.elements}
        size = sum(len(targets[a]) ** len(fibers[a]) for a in base.elements)
        if size > self.max_set_size:
            raise MaterializationError(f"construction Hom_U({p.dom.label},{q.dom.label}) would have {size} elements; "
                                       f"cap is {self.max_set_size}")
        elements = [
            (a, images)
            for a in base.elements
            for images in itertools.product(targets[a], repeat=len(fibers[a]))
        ]
        obj = FinSet(elements, f"Hom({p.dom.name or 'E'},{q.dom.name or 'F'})")
        proj = Mor(obj, base, (h[0] for h in obj.elements), check=False)
        evaluation_domain = self.fiber_product(proj, p)
        positions = {a: {e: i for i, e in enumerate(fibers[a])} for a in base.elements}
        ev = Mor(
            evaluation_domain.apex,
            q.dom,
            (h[1][positions[h[0]][e]] for h, e in evaluation_domain.apex.elements),
            check=False,
        )
        choice = SliceHomChoice(p, q, obj, proj, ev, evaluation_domain, fibers)
        logger.debug(f"slice Hom {obj.label} materialized over {base.label}")
        with self._lock:
            return self._slice_homs.setdefault(key, choice)

    def adj(self, f: Mor, hom: SliceHomChoice) -> Mor:
        """adj(f) = (f ×_U id_E)∘ev for f: A → Hom_U(E,F); A lies over U through f∘proj."""
        if f.cod != hom.obj:
            raise LCCError(f"{f!r} does not land in {hom.obj.label}")
        alpha = f.then(hom.proj)
        domain = self.fiber_product(alpha, hom.source)
        return self.times(domain, hom.evaluation_domain, f, Mor.identity(hom.source.dom)).then(hom.ev)

    def adj_inv(self, g: Mor, hom: SliceHomChoice, alpha: Mor) -> Mor:
        """The f: A → Hom_U(E,F) with adj(f) = g, for g: A×_U E → F over U."""
        domain = self.fiber_product(alpha, hom.source)
        if g.dom != domain.apex or g.cod != hom.target.dom:
            raise LCCError(f"{g!r} is not a morphism out of {domain.apex.label} into {hom.target.dom.label}")
        if g.then(hom.target) != domain.pr1.then(alpha):
            raise LCCError("morphism is not over U")
        values = g.as_dict()
        return Mor(
            alpha.dom,
            hom.obj,
            ((alpha(x), tuple(values[(x, e)] for e in hom.fibers[alpha(x)])) for x in alpha.dom.elements),
            check=False,
        )

    def hom_post(self, hom: SliceHomChoice, g: Mor, target: SliceHomChoice) -> Mor:
        """Hom_U(E, g): postcomposition with g: F → F′ over U."""
        if target.source != hom.source or g.dom != hom.target.dom or g.cod != target.target.dom:
            raise LCCError("postcomposition does not match the slice Homs")
        if g.then(target.target) != hom.target:
            raise LCCError(f"{g!r} is not over U")
        return Mor(
            hom.obj,
            target.obj,
            ((a, tuple(g(y) for y in images)) for a, images in hom.obj.elements),
            check=False,
        )

    def hom_pre(self, h: Mor, hom: SliceHomChoice, target: SliceHomChoice) -> Mor:
        """Hom_U(h, F): precomposition with h: E′ → E over U."""
        if target.target != hom.target or h.cod != hom.source.dom or h.dom != target.source.dom:
            raise LCCError("precomposition does not match the slice Homs")
        if h.then(hom.source) != target.source:
            raise LCCError(f"{h!r} is not over U")
        positions = {a: {e: i for i, e in enumerate(fiber)} for a, fiber in hom.fibers.items()}
        return Mor(
            hom.obj,
            target.obj,
            (
                (a, tuple(images[positions[a][h(e)]] for e in target.fibers[a]))
                for a, images in hom.obj.elements
            ),
            check=False,
        )

    def i_p(self, p: Mor, V: FinSet) -> SliceHomChoice:
        """I_p(V) = Hom_U((Ũ,p),(U×V,pr1)); ``proj`` is prI_p(V)."""
        return self.slice_hom(p, self.product(p.cod, V).pr1)

    def i_p_mor(self, p: Mor, f: Mor) -> Mor:
        """I_p(f): I_p(V) → I_p(V′)."""
        U = p.cod
        source = self.product(U, f.dom)
        target = self.product(U, f.cod)
        id_times_f = self.times(source, target, Mor.identity(U), f)
        return self.hom_post(self.i_p(p, f.dom), id_times_f, self.i_p(p, f.cod))

    def i_hom(self, h: Mor, p: Mor, p_prime: Mor, V: FinSet) -> Mor:
        """I^h(V): I_p(V) → I_{p′}(V) for h: Ũ′ → Ũ with h∘p = p′."""
        if h.then(p) != p_prime:
            raise LCCError(f"{h!r} is not over U")
        return self.hom_pre(h, self.i_p(p, V), self.i_p(p_prime, V))

    def second_projection(self, U: FinSet, V: FinSet) -> Mor:
        return self.product(U, V).pr2


def d_p_act(universe, f: Mor, d: DpElement) -> DpElement:
    """D_p(f,V): (F,a) ↦ (f∘F, Q(f,F)∘a)."""
    return DpElement(f.then(d.F), universe.q_of(f, d.F).then(d.a))


def d_p_post(d: DpElement, g: Mor) -> DpElement:
    """D_p(X,g): (F,a) ↦ (F, a∘g)."""
    return DpElement(d.F, d.a.then(g))


def d_f(universe, source_universe, f: Mor, d: DpElement) -> DpElement:
    """D^f(X,V): (F,F′) ↦ (F, F*(f)∘F′), from D_p(X,V) to D_{p′}(X,V) for f: Ũ′ → Ũ over U."""
    return DpElement(d.F, universe.star(d.F, f, source_universe).then(d.a))


def eta(universe, lcc: FinSetLCC, d: DpElement, V: FinSet) -> Mor:
    """η: D_p(X,V) → Hom(X, I_p(V))."""
    p = universe.p
    square = universe.ext(d.F)
    if d.a.dom != square.apex or d.a.cod != V:
        raise LCCError(f"{d.a!r} is not a morphism ({square.apex.label}) → {V.label}")
    hom = lcc.i_p(p, V)
    points = lcc.fiber_product(d.F, p)
    comparison = mediate(square.proj, square.q, points.pr1, points.pr2).then(d.a).as_dict()
    X = d.F.dom
    return Mor(
        X,
        hom.obj,
        ((d.F(x), tuple((d.F(x), comparison[(x, u)]) for u in hom.fibers[d.F(x)])) for x in X.elements),
        check=False,
    )


def evaluation(universe, lcc: FinSetLCC, V: FinSet) -> Mor:
    """st: (I_p(V);pr) → V, the composite ι′∘ev′∘pr_2."""
    hom = lcc.i_p(universe.p, V)
    square = universe.ext(hom.proj)
    iota = hom.evaluation_domain.pair(square.proj, square.q)
    return iota.then(hom.ev).then(lcc.second_projection(universe.base, V))


def eta_bang(universe, lcc: FinSetLCC, g: Mor, V: FinSet) -> DpElement:
    """η!: g ↦ (g∘pr, Q(g,pr)∘st)."""
    hom = lcc.i_p(universe.p, V)
    if g.cod != hom.obj:
        raise LCCError(f"{g!r} does not land in I_p({V.label})")
    pr = hom.proj
    return DpElement(g.then(pr), universe.q_of(g, pr).then(evaluation(universe, lcc, V)))


def d_p_elements(universe, X: FinSet, V: FinSet, limit: Optional[int] = None) -> Iterator[DpElement]:
    """Every element of D_p(X,V), in canonical order."""
    cap = MAX_SEARCH_RESULTS if limit is None else limit
    produced = 0
    for F in FINSET.hom(X, universe.base):
        apex = universe.ext(F).apex
        for a in FINSET.hom(apex, V):
            produced += 1
            if produced > cap:
                raise MaterializationError(f"D_p({X.label},{V.label}) has more than {cap} elements")
            yield DpElement(F, a)


class EtaBijection:
    """
    η and η! tabulated for one (X, V), with the roundtrip verified at construction.

    Raises:
        LCCError: if the two tables are not mutually inverse
    """

    def __init__(self, universe, lcc: FinSetLCC, X: FinSet, V: FinSet, limit: Optional[int] = None):
        self.X = X
        self.V = V
        hom = lcc.i_p(universe.p, V)
        self.forward: Dict[DpElement, Mor] = {}
        self.backward: Dict[Mor, DpElement] = {}
        for d in d_p_elements(universe, X, V, limit):
            g = eta(universe, lcc, d, V)
            self.forward[d] = g
        for g in FINSET.hom(X, hom.obj):
            self.backward[g] = eta_bang(universe, lcc, g, V)
        for d, g in self.forward.items():
            if self.backward.get(g) != d:
                raise LCCError(f"η! ∘ η is not the identity at {d.F!r}")
        if len(self.forward) != len(self.backward):
            raise LCCError(f"D_p({X.label},{V.label}) and Hom({X.label}, I_p) differ in size")

    def __len__(self) -> int:
        return len(self.forward)


def i_p_fiber_sizes(lcc: FinSetLCC, p: Mor, V: FinSet) -> Dict[Hashable, int]:
    hom = lcc.i_p(p, V)
    return {a: len(hom.fiber_over(a)) for a in p.cod.elements}


def check_eta(universe, lcc: FinSetLCC, objects: Sequence[FinSet], max_instances: Optional[int] = None) -> CheckResult:
    """η/η! roundtrips on every enumerated (X, V)."""
    with CheckRecorder("lcc.eta", "η and η! are mutually inverse", max_instances) as rec:
        for X, V in itertools.product(objects, repeat=2):
            hom = lcc.i_p(universe.p, V)
            for d in d_p_elements(universe, X, V):
                rec.instance()
                rec.expect(eta_bang(universe, lcc, eta(universe, lcc, d, V), V) == d,
                           "η!(η(d)) differs from d", X=X, V=V, d=d)
            for g in FINSET.hom(X, hom.obj):
                rec.instance()
                rec.expect(eta(universe, lcc, eta_bang(universe, lcc, g, V), V) == g,
                           "η(η!(g)) differs from g", X=X, V=V, g=g)
    return rec.result()


def check_adj(lcc: FinSetLCC, p: Mor, objects: Sequence[FinSet], max_instances: Optional[int] = None) -> CheckResult:
    """Roundtrips of adj and the two composition identities, over I_p(V) for enumerated V, A."""
    U = p.cod
    with CheckRecorder("lcc.adj", "adj roundtrip and composition identities", max_instances) as rec:
        for V in objects:
            hom = lcc.i_p(p, V)
            rec.instance()
            rec.expect(lcc.adj(Mor.identity(hom.obj), hom) == hom.ev, "adj(id) differs from ev", V=V)
            for W in objects:
                hom_w = lcc.i_p(p, W)
                posts = [lcc.i_p_mor(p, g) for g in FINSET.hom(V, W)]
                for A in objects:
                    for f in FINSET.hom(A, hom.obj):
                        rec.instance()
                        alpha = f.then(hom.proj)
                        g = lcc.adj(f, hom)
                        rec.expect(lcc.adj_inv(g, hom, alpha) == f, "adj_inv(adj(f)) differs from f", f=f)
                        for post, v_to_w in zip(posts, FINSET.hom(V, W)):
                            rec.instance()
                            product_map = lcc.times(lcc.product(U, V), lcc.product(U, W), Mor.identity(U), v_to_w)
                            rec.expect(lcc.adj(f.then(post), hom_w) == g.then(product_map),
                                       "adj(f∘Hom(E,g)) differs from adj(f)∘g", f=f, g=v_to_w)
                        for A2 in objects:
                            for h in FINSET.hom(A2, A):
                                rec.instance()
                                beta = h.then(alpha)
                                source = lcc.fiber_product(beta, p)
                                target = lcc.fiber_product(alpha, p)
                                h_times = lcc.times(source, target, h, Mor.identity(p.dom))
                                rec.expect(lcc.adj(h.then(f), hom) == h_times.then(g),
                                           "adj(h∘f) differs from (h×id)∘adj(f)", f=f, h=h)
    return rec.result()


def check_i_p_functor(lcc: FinSetLCC, p: Mor, objects: Sequence[FinSet],
                      max_instances: Optional[int] = None) -> CheckResult:
    with CheckRecorder("lcc.i_p", "I_p preserves identities and composition and is over U", max_instances) as rec:
        for V in objects:
            hom = lcc.i_p(p, V)
            rec.instance()
            rec.expect(lcc.i_p_mor(p, Mor.identity(V)) == Mor.identity(hom.obj), "I_p(id) is not id", V=V)
            sizes = i_p_fiber_sizes(lcc, p, V)
            for a in p.cod.elements:
                rec.instance()
                rec.expect(sizes[a] == len(V) ** len(p.fiber(a)), "fiber of I_p(V) has the wrong size", V=V, code=a)
        for V, W, Y in itertools.product(objects, repeat=3):
            for f in FINSET.hom(V, W):
                i_f = lcc.i_p_mor(p, f)
                rec.expect(i_f.then(lcc.i_p(p, W).proj) == lcc.i_p(p, V).proj, "I_p(f) is not over U", f=f)
                for g in FINSET.hom(W, Y):
                    rec.instance()
                    rec.expect(lcc.i_p_mor(p, f.then(g)) == i_f.then(lcc.i_p_mor(p, g)),
                               "I_p(f∘g) differs from I_p(f)∘I_p(g)", f=f, g=g)
    return rec.result()


def check_i_hom_naturality(lcc: FinSetLCC, h: Mor, p: Mor, p_prime: Mor, objects: Sequence[FinSet],
                           max_instances: Optional[int] = None) -> CheckResult:
    """I^h(V)∘I_{p′}(f) = I_p(f)∘I^h(V′) for every f: V → V′."""
    with CheckRecorder("2015.04.10.l2", "I^h is natural in V", max_instances) as rec:
        for V, W in itertools.product(objects, repeat=2):
            left_leg = lcc.i_hom(h, p, p_prime, V)
            right_leg = lcc.i_hom(h, p, p_prime, W)
            for f in FINSET.hom(V, W):
                rec.instance()
                rec.expect(left_leg.then(lcc.i_p_mor(p_prime, f)) == lcc.i_p_mor(p, f).then(right_leg),
                           "naturality square of I^h does not commute", f=f)
    return rec.result()


def check_d_f_lemma(universe, source_universe, lcc: FinSetLCC, f: Mor, objects: Sequence[FinSet],
                    max_instances: Optional[int] = None) -> CheckResult:
    """η′(D^f(X,V)(η!(g))) = g∘I^f(V) for f: Ũ′ → Ũ over U and every g: X → I_p(V)."""
    p, p_prime = universe.p, source_universe.p
    with CheckRecorder("2015.04.02.l4", "η′∘D^f∘η! is postcomposition with I^f", max_instances) as rec:
        for V in objects:
            i_f = lcc.i_hom(f, p, p_prime, V)
            hom = lcc.i_p(p, V)
            for X in objects:
                for g in FINSET.hom(X, hom.obj):
                    rec.instance()
                    transported = d_f(universe, source_universe, f, eta_bang(universe, lcc, g, V))
                    rec.expect(eta(source_universe, lcc, transported, V) == g.then(i_f),
                               "η′(D^f(η!(g))) differs from g∘I^f(V)", X=X, V=V, g=g)
    return rec.result()


def check_d_p_functoriality(universe, objects: Sequence[FinSet], V: FinSet,
                            max_instances: Optional[int] = None) -> CheckResult:
    """D_p(g, D_p(f, d)) = D_p(g∘f, d), with g: X″ → X′ acting first."""
    with CheckRecorder("lcc.d_p", "D_p(-,V) is functorial", max_instances) as rec:
        for X in objects:
            elements = list(d_p_elements(universe, X, V))
            for X1 in objects:
                for f in FINSET.hom(X1, X):
                    for X2 in objects:
                        for g in FINSET.hom(X2, X1):
                            for d in elements:
                                rec.instance()
                                rec.expect(
                                    d_p_act(universe, g, d_p_act(universe, f, d)) == d_p_act(universe, g.then(f), d),
                                    "D_p action is not functorial", f=f, g=g, d=d)
    return rec.result()
