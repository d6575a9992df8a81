"""
J0, J1 and J2 structures on a C-system, the derived IdxT and rf_T, and their checks.

Structures are functions memoized into finite tables; the naturality equations are
validated here, never used to generate values.
"""
import threading
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from core.csystem.csystem import CSystem, CSystemHomomorphism, Section
from core.exceptions import FormalError, JStructureError
from core.verification.report import CheckRecorder, CheckResult


@dataclass(frozen=True)
class JdomEntry:
    """(Γ, T, P, s0) with ft(T) = Γ, ft(P) = IdxT(T) and ∂(s0) = rf_T*(P)."""

    gamma: Any
    T: Any
    P: Any
    s0: Section

    def describe(self) -> Dict[str, Any]:
        return {"gamma": repr(self.gamma), "T": repr(self.T), "P": repr(self.P), "s0": self.s0.describe()}


class _Memo:
    def __init__(self):
        self._table: Dict[Any, Any] = {}
        self._lock = threading.Lock()

    def get(self, key: Any, compute: Callable[[], Any]) -> Any:
        value = self._table.get(key)
        if value is None:
            value = compute()
            with self._lock:
                value = self._table.setdefault(key, value)
        return value

    def __len__(self) -> int:
        return len(self._table)


class J0Structure:
    """IdT_Γ(o, o′) ∈ Ob_1(Γ) for sections o, o′ of a common T ∈ Ob_1(Γ)."""

    def __init__(self, cs: CSystem, fn: Callable[[Any, Section, Section], Any], name: str = "IdT"):
        self.cs = cs
        self.fn = fn
        self.name = name
        self._memo = _Memo()

    def __call__(self, gamma: Any, o: Section, o2: Section) -> Any:
        if o.target != o2.target:
            raise JStructureError("IdT needs two sections with the same boundary")
        if self.cs.ft(o.target) != gamma or self.cs.length(o.target) != self.cs.length(gamma) + 1:
            raise JStructureError("IdT needs sections in Õb_1(Γ)")
        return self._memo.get((gamma, o, o2), lambda: self.fn(gamma, o, o2))


class J1Structure:
    """refl: Õb_1(Γ) → Õb_1(Γ)."""

    def __init__(self, cs: CSystem, fn: Callable[[Any, Section], Section], name: str = "refl"):
        self.cs = cs
        self.fn = fn
        self.name = name
        self._memo = _Memo()

    def __call__(self, gamma: Any, o: Section) -> Section:
        if self.cs.ft(o.target) != gamma:
            raise JStructureError("refl needs a section in Õb_1(Γ)")
        return self._memo.get((gamma, o), lambda: self.fn(gamma, o))


class J2Structure:
    """J(Γ,T,P,s0) ∈ Õb(P) on Jdom entries, with optional per-entry overrides."""

    def __init__(self, cs: CSystem, fn: Callable[[JdomEntry], Section], name: str = "J",
                 overrides: Optional[Dict[JdomEntry, Section]] = None):
        self.cs = cs
        self.fn = fn
        self.name = name
        self.overrides = dict(overrides or {})
        self._memo = _Memo()

    def __call__(self, entry: JdomEntry) -> Section:
        if entry in self.overrides:
            return self.overrides[entry]
        return self._memo.get(entry, lambda: self.fn(entry))

    def with_override(self, entry: JdomEntry, value: Section) -> "J2Structure":
        overrides = dict(self.overrides)
        overrides[entry] = value
        return J2Structure(self.cs, self.fn, f"{self.name}'", overrides)


@dataclass
class JBundleC:
    """(IdT, refl, J) on one C-system."""

    cs: CSystem
    idt: J0Structure
    refl: J1Structure
    j: Optional[J2Structure] = None
    name: str = "J"

    def with_j(self, j: J2Structure) -> "JBundleC":
        return JBundleC(self.cs, self.idt, self.refl, j, self.name)


def idx_t(cs: CSystem, idt: J0Structure, T: Any) -> Any:
    """IdxT(T) = IdT_{p_T*(T)}(p_{p_T*(T)}*(δ(T)), δ(p_T*(T)))."""
    delta = cs.delta(T)
    A = delta.target
    pulled = cs.pullback_section(cs.proj(A), delta, 1)
    return idt(A, pulled, cs.delta(A))


def rf(cs: CSystem, idt: J0Structure, refl: J1Structure, T: Any) -> Any:
    """rf_T = refl(δ(T))∘q(δ(T), IdxT(T)): T → IdxT(T)."""
    delta = cs.delta(T)
    X = idx_t(cs, idt, T)
    reflexive = refl(T, delta)
    q = cs.q(delta.mor, X)
    if reflexive.target != cs.dom(q):
        raise JStructureError("refl(δ(T)) does not land in δ(T)*(IdxT(T))")
    return cs.compose(reflexive.mor, q)


def is_jdom_entry(cs: CSystem, idt: J0Structure, refl: J1Structure, entry: JdomEntry) -> bool:
    try:
        if cs.length(entry.T) != cs.length(entry.gamma) + 1 or cs.ft(entry.T) != entry.gamma:
            return False
        X = idx_t(cs, idt, entry.T)
        if cs.length(entry.P) != cs.length(X) + 1 or cs.ft(entry.P) != X:
            return False
        expected = cs.base_change(rf(cs, idt, refl, entry.T), entry.P)
        return entry.s0.target == expected and cs.is_section(entry.s0)
    except FormalError:
        return False


def jdom_enum(cs: CSystem, idt: J0Structure, refl: J1Structure, bound: int) -> List[JdomEntry]:
    """Every Jdom entry with l(T) ≤ bound, in the canonical order of the C-system's enumerators."""
    entries: List[JdomEntry] = []
    for T in cs.objects(bound):
        if cs.length(T) == 0:
            continue
        gamma = cs.ft(T)
        X = idx_t(cs, idt, T)
        r = rf(cs, idt, refl, T)
        for P in cs.extensions(X):
            for s0 in cs.sections(cs.base_change(r, P)):
                entries.append(JdomEntry(gamma, T, P, s0))
    logger.debug(f"Jdom at bound {bound}: {len(entries)} entries")
    return entries


def base_objects(cs: CSystem, bound: int) -> List[Any]:
    return cs.objects(bound)


def section_pairs(cs: CSystem, gamma: Any) -> Iterator[Tuple[Any, List[Section]]]:
    for T in cs.extensions(gamma):
        yield T, list(cs.sections(T))


def check_j0(cs: CSystem, idt: J0Structure, bound: int, check_id: str = "2015.03.27.def1",
             max_instances: Optional[int] = None) -> CheckResult:
    """f*(IdT_Γ(o,o′)) = IdT_Γ′(f*(o), f*(o′)) for all f: Γ′ → Γ with l(Γ), l(Γ′) ≤ bound."""
    with CheckRecorder(check_id, "IdT is natural in Γ", max_instances) as rec:
        objects = base_objects(cs, bound)
        for gamma in objects:
            families = list(section_pairs(cs, gamma))
            for source in objects:
                for f in cs.hom(source, gamma):
                    for T, sections in families:
                        pulled = {o: cs.pullback_section(f, o, 1) for o in sections}
                        for o in sections:
                            for o2 in sections:
                                rec.instance()
                                left = cs.pullback_object(f, idt(gamma, o, o2), 1)
                                right = idt(source, pulled[o], pulled[o2])
                                rec.expect(left == right, "f*(IdT(o,o′)) differs from IdT(f*o, f*o′)",
                                           f=f, o=o, o2=o2)
    return rec.result()


def check_j1(cs: CSystem, idt: J0Structure, refl: J1Structure, bound: int,
             max_instances: Optional[int] = None) -> List[CheckResult]:
    """∂(refl(o)) = IdT(o,o) and naturality of refl."""
    with CheckRecorder("2015.03.27.eq8", "∂(refl(o)) = IdT(o,o)", max_instances) as boundary:
        objects = base_objects(cs, bound)
        for gamma in objects:
            for T, sections in section_pairs(cs, gamma):
                for o in sections:
                    boundary.instance()
                    r = refl(gamma, o)
                    boundary.expect(cs.is_section(r), "refl(o) is not a section", o=o)
                    boundary.expect(r.target == idt(gamma, o, o), "∂(refl(o)) differs from IdT(o,o)", o=o)
    with CheckRecorder("2015.03.27.def2", "refl is natural in Γ", max_instances) as natural:
        for gamma in objects:
            families = list(section_pairs(cs, gamma))
            for source in objects:
                for f in cs.hom(source, gamma):
                    for T, sections in families:
                        for o in sections:
                            natural.instance()
                            left = cs.pullback_section(f, refl(gamma, o), 1)
                            right = refl(source, cs.pullback_section(f, o, 1))
                            natural.expect(left == right, "f*(refl(o)) differs from refl(f*o)", f=f, o=o)
    return [boundary.result(), natural.result()]


def check_idx_rf(cs: CSystem, idt: J0Structure, refl: J1Structure, bound: int,
                 max_instances: Optional[int] = None) -> List[CheckResult]:
    """Naturality of IdxT and rf_T, and δ(T)*(IdxT(T)) = IdT_T(δ(T),δ(T))."""
    with CheckRecorder("2015.03.27.constr2", "δ(T)*(IdxT(T)) = IdT_T(δ(T),δ(T))", max_instances) as computed:
        objects = base_objects(cs, bound)
        for T in objects:
            if cs.length(T) == 0:
                continue
            computed.instance()
            delta = cs.delta(T)
            computed.expect(cs.base_change(delta.mor, idx_t(cs, idt, T)) == idt(T, delta, delta),
                            "δ(T)*(IdxT(T)) differs from IdT_T(δ(T),δ(T))", object=T)
    with CheckRecorder("2015.03.27.prob1", "IdxT and rf_T are natural in Γ", max_instances) as natural:
        for T in objects:
            if cs.length(T) == 0:
                continue
            gamma = cs.ft(T)
            X = idx_t(cs, idt, T)
            r = rf(cs, idt, refl, T)
            for source in objects:
                if cs.length(source) >= bound:
                    continue
                for f in cs.hom(source, gamma):
                    natural.instance()
                    changed = cs.pullback_object(f, T, 1)
                    natural.expect(cs.pullback_object(f, X, 3) == idx_t(cs, idt, changed),
                                   "f*(IdxT(T)) differs from IdxT(f*T)", f=f, object=T)
                    natural.expect(cs.pullback_morphism(f, r, 1, 3) == rf(cs, idt, refl, changed),
                                   "f*(rf_T) differs from rf_(f*T)", f=f, object=T)
    return [computed.result(), natural.result()]


def check_iota(cs: CSystem, bundle: JBundleC, entries: Sequence[JdomEntry], check_id: str = "2015.03.27.def3",
               max_instances: Optional[int] = None) -> CheckResult:
    """rf_T*(J(Γ,T,P,s0)) = s0 and J(Γ,T,P,s0) ∈ Õb(P)."""
    with CheckRecorder(check_id, "J satisfies the ι-rule", max_instances) as rec:
        for entry in entries:
            rec.instance()
            value = bundle.j(entry)
            if not rec.expect(value.target == entry.P and cs.is_section(value), "J is not a section of P",
                              entry=entry):
                continue
            r = rf(cs, bundle.idt, bundle.refl, entry.T)
            rec.expect(cs.pullback_section(r, value, 1) == entry.s0, "rf_T*(J) differs from s0", entry=entry)
    return rec.result()


def check_j2_naturality(cs: CSystem, bundle: JBundleC, entries: Sequence[JdomEntry], bound: int,
                        check_id: str = "2015.03.27.def3", max_instances: Optional[int] = None) -> CheckResult:
    """f*(J(Γ,T,P,s0)) = J(Γ′, f*T, f*P, f*s0) for f: Γ′ → Γ with l(Γ′) < bound."""
    with CheckRecorder(check_id, "J is natural in Γ", max_instances) as rec:
        sources = [obj for obj in cs.objects(max(bound - 1, 0))]
        for entry in entries:
            value = bundle.j(entry)
            for source in sources:
                for f in cs.hom(source, entry.gamma):
                    rec.instance()
                    moved = JdomEntry(
                        source,
                        cs.pullback_object(f, entry.T, 1),
                        cs.pullback_object(f, entry.P, 4),
                        cs.pullback_section(f, entry.s0, 2),
                    )
                    rec.expect(cs.pullback_section(f, value, 4) == bundle.j(moved),
                               "f*(J(Γ,T,P,s0)) differs from J(f*(Γ,T,P,s0))", f=f, entry=entry)
    return rec.result()


def check_j(cs: CSystem, bundle: JBundleC, bound: int, entries: Optional[Sequence[JdomEntry]] = None,
            max_instances: Optional[int] = None) -> List[CheckResult]:
    """Definitions of J0, J1 and J2 structures, jointly."""
    results = [check_j0(cs, bundle.idt, bound, max_instances=max_instances)]
    results.extend(check_j1(cs, bundle.idt, bundle.refl, bound, max_instances=max_instances))
    if bundle.j is not None:
        if entries is None:
            entries = jdom_enum(cs, bundle.idt, bundle.refl, bound)
        results.append(check_iota(cs, bundle, entries, max_instances=max_instances))
        results.append(check_j2_naturality(cs, bundle, entries, bound, max_instances=max_instances))
    return results


def is_extensional(cs: CSystem, idt: J0Structure, bound: int) -> bool:
    return check_extensional(cs, idt, bound).violation_count == 0


def check_extensional(cs: CSystem, idt: J0Structure, bound: int, max_instances: Optional[int] = None) -> CheckResult:
    """Õb(IdT(o,o′)) is a point when o = o′ and empty otherwise, for every T with l(T) ≤ bound."""
    with CheckRecorder("2015.05.12.rem1", "IdT is extensional", max_instances) as rec:
        for T in cs.objects(bound):
            if cs.length(T) == 0:
                continue
            gamma = cs.ft(T)
            sections = list(cs.sections(T))
            for o in sections:
                for o2 in sections:
                    rec.instance()
                    count = sum(1 for _ in cs.sections(idt(gamma, o, o2)))
                    expected = 1 if o == o2 else 0
                    rec.expect(count == expected, f"Õb(IdT(o,o′)) has {count} elements, expected {expected}",
                               o=o, o2=o2)
    return rec.result()


DEFAULT_HOM_LABELS = {"j0": "2015.04.06.def1", "j1": "2015.04.06.def1", "j2": "2015.04.06.def2"}


def check_hom_j(h: CSystemHomomorphism, source: JBundleC, target: JBundleC, bound: int,
                labels: Optional[Dict[str, str]] = None, max_instances: Optional[int] = None) -> List[CheckResult]:
    """
    H preserves IdT, refl, IdxT, rf and J on all enumerated inputs, and base change of
    motives along rf_T.

    Args:
        h: homomorphism between the two C-systems
        source: bundle on h.source
        target: bundle on h.target
        bound: length bound for Γ and T
        labels: check ids for the J0, J1 and J2 parts
    """
    labels = {**DEFAULT_HOM_LABELS, **(labels or {})}
    cs, cs2 = h.source, h.target
    objects = cs.objects(bound)
    with CheckRecorder(labels["j0"], f"{h.name} preserves IdT and IdxT", max_instances) as j0:
        for gamma in objects:
            for T, sections in section_pairs(cs, gamma):
                for o in sections:
                    for o2 in sections:
                        j0.instance()
                        j0.expect(h.ob(source.idt(gamma, o, o2)) ==
                                  target.idt(h.ob(gamma), h.section(o), h.section(o2)),
                                  "H(IdT(o,o′)) differs from IdT′(H o, H o′)", o=o, o2=o2)
        for T in objects:
            if cs.length(T) == 0:
                continue
            j0.instance()
            j0.expect(h.ob(idx_t(cs, source.idt, T)) == idx_t(cs2, target.idt, h.ob(T)),
                      "H(IdxT(T)) differs from IdxT′(H T)", object=T)
    with CheckRecorder(labels["j1"], f"{h.name} preserves refl and rf", max_instances) as j1:
        for gamma in objects:
            for T, sections in section_pairs(cs, gamma):
                for o in sections:
                    j1.instance()
                    j1.expect(h.section(source.refl(gamma, o)) == target.refl(h.ob(gamma), h.section(o)),
                              "H(refl(o)) differs from refl′(H o)", o=o)
        for T in objects:
            if cs.length(T) == 0:
                continue
            j1.instance()
            j1.expect(h.ar(rf(cs, source.idt, source.refl, T)) == rf(cs2, target.idt, target.refl, h.ob(T)),
                      "H(rf_T) differs from rf′_(H T)", object=T)
    results = [j0.result(), j1.result()] if labels["j0"] != labels["j1"] else [_merge(j0.result(), j1.result())]
    if source.j is None or target.j is None:
        return results
    with CheckRecorder(labels["j2"], f"{h.name} preserves J", max_instances) as j2, \
            CheckRecorder("2015.04.06.l3", "H commutes with base change of motives along rf_T",
                          max_instances) as motives:
        for entry in jdom_enum(cs, source.idt, source.refl, bound):
            j2.instance()
            moved = JdomEntry(h.ob(entry.gamma), h.ob(entry.T), h.ob(entry.P), h.section(entry.s0))
            j2.expect(h.section(source.j(entry)) == target.j(moved), "H(J(Γ,T,P,s0)) differs from J′(H(Γ,T,P,s0))",
                      entry=entry)
            motives.instance()
            r = rf(cs, source.idt, source.refl, entry.T)
            motives.expect(h.ob(cs.base_change(r, entry.P)) == cs2.base_change(h.ar(r), h.ob(entry.P)),
                           "H(rf_T*(P)) differs from H(rf_T)*(H P)", entry=entry)
            motives.expect(h.section(cs.pullback_section(r, source.j(entry), 1)) ==
                           cs2.pullback_section(h.ar(r), h.section(source.j(entry)), 1),
                           "H(rf_T*(J)) differs from H(rf_T)*(H J)", entry=entry)
    results.extend([j2.result(), motives.result()])
    return results


def _merge(first: CheckResult, second: CheckResult) -> CheckResult:
    merged = CheckResult(
        check_id=first.check_id,
        description=f"{first.description}; {second.description}",
        status=first.status if first.failed else second.status,
        instances=first.instances + second.instances,
        violation_count=first.violation_count + second.violation_count,
        counterexamples=(first.counterexamples + second.counterexamples),
        complete=first.complete and second.complete,
        notes=first.notes + second.notes,
        elapsed_seconds=first.elapsed_seconds + second.elapsed_seconds,
    )
    return merged
