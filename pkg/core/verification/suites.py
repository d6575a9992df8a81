"""
Verification suites: named groups of checks over one fixture context, keyed by anchor ids.

A suite is planned as a list of tasks; tasks run on a thread pool and the report keeps
the planned order whatever order they finish in.
"""
import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from loguru import logger

from config.settings import (
    CSYSTEM_AXIOM_BOUND,
    CSYSTEM_LENGTH_BOUND,
    LIFTING_SET_BOUND,
    MAX_THREADS,
)
from core.category.fincat import FinSet, Mor, check_category_axioms
from core.category.lcc import (
    check_adj,
    check_d_f_lemma,
    check_d_p_functoriality,
    check_eta,
    check_i_hom_naturality,
    check_i_p_functor,
)
from core.csystem.cc_univ import (
    UniverseCSystem,
    build_cc,
    check_q_equation,
    check_u1,
    check_u1_naturality,
    object_counts,
)
from core.csystem.csystem import check_csystem_axioms
from core.csystem.jcs import JBundleC, check_extensional, check_idx_rf, check_j, jdom_enum
from core.csystem.transfer import check_extensional_eq_unique, check_transfer, transfer_bundle
from core.exceptions import FixtureError, HypothesisError
from core.models.documents import FixtureContext, FixtureDocument
from core.models.fixtures import Fixture, FunctorFixture
from core.universe.functors import check_h, check_h_j_compat, check_two_universe, check_ucfunctor, h_of
from core.universe.juniv import check_coj, check_filler_bijection, check_univ_j
from core.universe.lifting import (
    CLASS_PAIRS,
    TH1,
    TH2,
    check_conditions,
    check_derive_j,
    check_fibrancy_lemmas,
    derive_j,
    derive_j_from_model_structure,
)
from core.universe.universe import (
    check_chosen_squares,
    check_delta,
    check_e_universe,
    check_q_laws,
    check_star_square,
    differs_from_normalized,
    fixture_morphisms,
)
from core.verification.defects import DEFECTS, Defect, get_defect
from core.verification.report import CheckRecorder, CheckResult, Report, skipped_result
from utils.concurrency import ThreadPool

SUITE_ORDER = ("category", "lcc", "csystem", "juniv", "transfer", "lifting", "functors", "skew", "negative")
SUITE_CHOICES = SUITE_ORDER + ("all",)
DEFAULT_SKEW_SEED = 7

# Suites whose verdicts are compared between choosers, and the tasks among them that do not involve p.
CHOOSER_SENSITIVE = ("category", "lcc", "csystem", "juniv", "transfer", "lifting", "functors")
CHOOSER_FREE_TASKS = frozenset({("category", "axioms"), ("lifting", "cond1"), ("lifting", "cond2")})


@dataclass
class SuiteOptions:
    bound: int = CSYSTEM_LENGTH_BOUND
    axiom_bound: int = CSYSTEM_AXIOM_BOUND
    lifting_bound: int = LIFTING_SET_BOUND
    class_pair: str = "iso-all"
    theorem: str = TH1
    skew_seed: int = DEFAULT_SKEW_SEED
    threads: int = MAX_THREADS
    max_instances: Optional[int] = None

    @classmethod
    def from_document(cls, document: FixtureDocument, **overrides) -> "SuiteOptions":
        options = document.options
        values = dict(
            bound=options.bounds.csystem,
            lifting_bound=options.bounds.lifting,
            class_pair=options.class_pair,
            theorem=options.theorem,
            skew_seed=options.skew or DEFAULT_SKEW_SEED,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class VerificationContext:
    """
    Everything the suites check for one fixture document.

    Features:
    - The primary fixture with CC(C,p) and the transferred bundle (IdT, refl, J)
    - The functor blocks of the document with a CC per universe
    - Rebuilding the same document under another chooser seed
    """

    def __init__(self, document: FixtureDocument, skew: Optional[int] = None):
        if skew is not None and skew != document.options.skew:
            options = document.options.model_copy(update={"skew": skew})
            document = document.model_copy(update={"options": options})
        self.document = document
        self.seed = document.options.skew
        self._ccs: Dict[str, UniverseCSystem] = {}
        self._lock = threading.Lock()
        self.fixtures = FixtureContext(document)
        self.fixture: Fixture = self.fixtures.primary
        self.cc = self.cc_for(self.fixture)
        self.bundle: JBundleC = transfer_bundle(self.cc, self.fixture.ju, self.fixture.bundle.Jp)
        self.defect: Optional[Defect] = get_defect(document.options.defect) if document.options.defect else None
        logger.info(f"Context {self.name} ready (chooser {self.fixture.uc.universe.chooser.name}, seed {self.seed})")

    @property
    def name(self) -> str:
        return self.document.name

    def cc_for(self, fixture: Fixture) -> UniverseCSystem:
        with self._lock:
            if fixture.name not in self._ccs:
                self._ccs[fixture.name] = build_cc(fixture.uc.universe, name=f"CC({fixture.name})")
            return self._ccs[fixture.name]

    def functors(self) -> List[FunctorFixture]:
        return self.fixtures.functors()

    def rebuild(self, seed: int) -> "VerificationContext":
        document = self.document
        if document.options.defect:
            document = document.model_copy(update={"options": document.options.model_copy(update={"defect": None})})
        return VerificationContext(document, skew=seed)


@dataclass
class Task:
    suite: str
    name: str
    run: Callable[[], List[CheckResult]]


def _objects(size: int) -> List[FinSet]:
    return [FinSet.skeletal(n) for n in range(size + 1)]


def category_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    uc, ju = ctx.fixture.uc, ctx.fixture.ju
    universe = uc.universe
    mi = options.max_instances
    small = uc.small_objects(2)
    morphisms = fixture_morphisms(universe, small + [uc.base, uc.total])
    return [
        Task("category", "axioms", lambda: [check_category_axioms(uc.category, max_instances=mi)]),
        Task("category", "squares", lambda: [check_chosen_squares(universe, morphisms, max_instances=mi)]),
        Task("category", "e-squares", lambda: [check_e_universe(ju.e, small, mi)]),
        Task("category", "q-laws", lambda: [check_q_laws(universe, small, mi)]),
        Task("category", "delta", lambda: [check_delta(universe)]),
        Task("category", "star", lambda: [check_star_square(ju.e, universe, ju.omega, small, mi)]),
    ]


def lcc_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    uc, ju = ctx.fixture.uc, ctx.fixture.ju
    universe, lcc = uc.universe, uc.lcc
    mi = options.max_instances
    objects = _objects(2)
    return [
        Task("lcc", "eta", lambda: [check_eta(universe, lcc, objects, mi)]),
        Task("lcc", "adj", lambda: [check_adj(lcc, universe.p, objects, mi)]),
        Task("lcc", "i_p", lambda: [check_i_p_functor(lcc, universe.p, objects, mi),
                                    check_i_p_functor(lcc, ju.p_e, objects, mi)]),
        Task("lcc", "i_hom", lambda: [check_i_hom_naturality(lcc, ju.omega, ju.p_e, universe.p, objects, mi)]),
        Task("lcc", "d_f", lambda: [check_d_f_lemma(ju.e, universe, lcc, ju.omega, objects, mi)]),
        Task("lcc", "d_p", lambda: [check_d_p_functoriality(universe, objects, FinSet.skeletal(2), mi)]),
    ]


def csystem_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    cc, mi, bound = ctx.cc, options.max_instances, options.bound
    return [
        Task("csystem", "axioms", lambda: [check_csystem_axioms(cc, options.axiom_bound, max_instances=mi)]),
        Task("csystem", "q-equation", lambda: [check_q_equation(cc, bound, max_instances=mi)]),
        Task("csystem", "u1", lambda: [check_u1(cc, bound, mi), check_u1_naturality(cc, bound, mi)]),
    ]


def juniv_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    fixture, mi = ctx.fixture, options.max_instances
    return [
        Task("juniv", "univ-j", lambda: check_univ_j(fixture.ju, fixture.bundle, mi)),
        Task("juniv", "coj", lambda: [check_coj(fixture.ju, mi)]),
        Task("juniv", "fillers", lambda: [check_filler_bijection(fixture.ju, max_instances=mi)]),
    ]


def transfer_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    cc, bundle, fixture = ctx.cc, ctx.bundle, ctx.fixture
    mi, bound = options.max_instances, options.bound
    return [
        Task("transfer", "transfer", lambda: check_transfer(cc, fixture.ju, bundle, bound, fixture.bundle.Jp,
                                                            max_instances=mi)),
        Task("transfer", "idx-rf", lambda: check_idx_rf(cc, bundle.idt, bundle.refl, bound, max_instances=mi)),
        Task("transfer", "extensional", lambda: [check_extensional(cc, bundle.idt, bound, mi),
                                                 check_extensional_eq_unique(fixture.uc, 1, fixture.ju.Eq, mi)]),
    ]


def _derived_bundle_checks(ctx: VerificationContext, options: SuiteOptions) -> List[CheckResult]:
    """Run the selected theorem and check the transferred J-structure it produces."""
    fixture, pair = ctx.fixture, CLASS_PAIRS[options.class_pair]
    uc, ju = fixture.uc, fixture.ju
    results = check_derive_j(uc, ju.Eq, ju.Omega, pair, options.theorem, options.lifting_bound)
    if not results[0].passed:
        return results
    derived = derive_j(uc, ju.Eq, ju.Omega, pair, options.theorem, options.lifting_bound)
    transferred = transfer_bundle(ctx.cc, ju, derived.Jp)
    results.extend(check_j(ctx.cc, transferred, options.bound, max_instances=options.max_instances))
    return results


def _model_structure_check(ctx: VerificationContext, options: SuiteOptions) -> CheckResult:
    fixture, pair = ctx.fixture, CLASS_PAIRS[options.class_pair]
    ju = fixture.ju
    with CheckRecorder("2015.05.18.cor1", f"{pair.name} as fibrations and trivial cofibrations yields Jp",
                       options.max_instances) as rec:
        rec.instance()
        bundle = derive_j_from_model_structure(fixture.uc, ju.Eq, ju.Omega, pair.fb, pair.tc, options.lifting_bound)
        for result in check_univ_j(ju, bundle, options.max_instances):
            rec.expect(result.passed, f"derived bundle fails {result.check_id}")
    return rec.result()


def lifting_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    pair = CLASS_PAIRS[options.class_pair]
    lcc, p = ctx.fixture.uc.lcc, ctx.fixture.uc.p
    mi, bound = options.max_instances, options.lifting_bound
    tasks = [Task("lifting", "cond2", lambda: [check_conditions(pair, "cond2", bound, lcc)])]
    if options.theorem == TH2:
        tasks.append(Task("lifting", "cond1", lambda: [check_conditions(pair, "cond1", bound, lcc)]))
    tasks.extend([
        Task("lifting", "fibrancy", lambda: check_fibrancy_lemmas(pair, bound, lcc, p, mi)),
        Task("lifting", "derive-j", lambda: _derived_bundle_checks(ctx, options)),
        Task("lifting", "model-structure", lambda: [_model_structure_check(ctx, options)]),
    ])
    return tasks


def functor_checks(ctx: VerificationContext, ff: FunctorFixture, options: SuiteOptions) -> List[CheckResult]:
    """Universe category functor clauses, the two-universe comparison, H(Φ) and its J-compatibility."""
    mi, bound = options.max_instances, options.bound
    results = check_ucfunctor(ff.functor, bound, ff.data, mi)
    if any(r.failed for r in results if r.check_id in ("fincat.functor", "2015.04.06.eq10")):
        for check_id in ("2015.04.08.l1", "2015.04.06.l7", "2015.04.10.th3", "2015.04.10.th1", "2015.05.10.l1"):
            results.append(skipped_result(check_id, f"{ff.name}", "not a functor of universe categories"))
        return results
    source_cc, target_cc = ctx.cc_for(ff.source), ctx.cc_for(ff.target)
    results.extend(check_two_universe(ff.data, bound, mi))
    results.extend(check_h(h_of(ff.functor, source_cc, target_cc), bound, mi))
    seen = {r.check_id for r in results}
    results.extend(r for r in check_h_j_compat(ff.data, bound, source_cc, target_cc, mi) if r.check_id not in seen)
    for r in results:
        r.notes.insert(0, f"functor {ff.name}: {ff.source.name} → {ff.target.name}")
    return results


def functors_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    return [Task("functors", ff.name, (lambda ff=ff: functor_checks(ctx, ff, options))) for ff in ctx.functors()]


def _j_table(cc: UniverseCSystem, bundle: JBundleC, bound: int) -> List[tuple]:
    return sorted(
        (repr(cc.encode_object(entry.P)), repr(cc.encode_section(entry.s0)), repr(cc.encode_section(bundle.j(entry))))
        for entry in jdom_enum(cc, bundle.idt, bundle.refl, bound)
    )


def canonical_tables(ctx: VerificationContext, bound: int) -> Dict[str, object]:
    """Construction tables after canonical relabeling through the chosen legs."""
    cc, bundle = ctx.cc, ctx.bundle
    objects = cc.objects(bound)
    idt_table = sorted(
        (repr(cc.encode_section(o)), repr(cc.encode_section(o2)), repr(cc.encode_object(bundle.idt(cc.ft(T), o, o2))))
        for T in objects if T.length > 0
        for o in cc.sections(T) for o2 in cc.sections(T)
    )
    return {
        "object_counts": object_counts(cc, bound),
        "objects": sorted(repr(cc.encode_object(gamma)) for gamma in objects),
        "IdT": idt_table,
        "J": _j_table(cc, bundle, bound),
    }


def derive_j_tables(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, object]:
    """
    Jp derived by the selected theorem, with the J it induces on CC(C,p).

    Raises:
        HypothesisError: a hypothesis of the theorem fails at the lifting bound
    """
    fixture = ctx.fixture
    ju = fixture.ju
    derived = derive_j(fixture.uc, ju.Eq, ju.Omega, CLASS_PAIRS[options.class_pair], options.theorem,
                       options.lifting_bound)
    return {
        "class_pair": options.class_pair,
        "theorem": options.theorem,
        "bundle": derived.describe(),
        "equals_extensional_jp": derived.Jp == fixture.bundle.Jp,
        "J": _j_table(ctx.cc, transfer_bundle(ctx.cc, ju, derived.Jp), options.bound),
    }


def h_of_tables(ctx: VerificationContext, bound: int) -> Dict[str, object]:
    """H(Φ) on objects with the maps ψ_Γ, for each functor block, in canonical encodings."""
    functors = {}
    for ff in ctx.functors():
        source_cc, target_cc = ctx.cc_for(ff.source), ctx.cc_for(ff.target)
        h = h_of(ff.functor, source_cc, target_cc)
        rows = []
        for gamma in source_cc.objects(bound):
            image = h.ob(gamma)
            rows.append({
                "object": repr(source_cc.encode_object(gamma)),
                "image": repr(target_cc.encode_object(image)),
                "psi": sorted(
                    [repr(target_cc.encode_element(image, y)), repr(source_cc.encode_element(gamma, x))]
                    for y, x in h.psi(gamma).items()
                ),
            })
        functors[ff.name] = {
            "source": ff.source.name,
            "target": ff.target.name,
            "injective_on_objects": len({row["image"] for row in rows}) == len(rows),
            "objects": sorted(rows, key=lambda row: row["object"]),
        }
    return functors


def chooser_tables(ctx: VerificationContext, options: SuiteOptions) -> Dict[str, object]:
    """Every canonical table the skew comparison looks at."""
    tables = canonical_tables(ctx, options.bound)
    tables["h-of"] = h_of_tables(ctx, options.bound)
    try:
        derived = derive_j_tables(ctx, options)
        derived.pop("bundle")
        tables["derive-j"] = derived
    except HypothesisError as e:
        tables["derive-j"] = {"hypothesis": e.hypothesis}
    return tables


def compared_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    return [t for suite in CHOOSER_SENSITIVE for t in SUITE_BUILDERS[suite](ctx, options)
            if (t.suite, t.name) not in CHOOSER_FREE_TASKS]


def check_skew_independence(ctx: VerificationContext, options: SuiteOptions) -> CheckResult:
    """Verdicts and canonical tables agree between the normalized and a skewed chooser."""
    seed = ctx.seed or options.skew_seed
    normalized = ctx if ctx.seed == 0 else ctx.rebuild(0)
    skewed = ctx.rebuild(seed)
    with CheckRecorder("2015.03.29.rm1", f"verdicts and tables do not depend on the chooser (seed {seed})",
                       options.max_instances) as rec:
        universe = skewed.fixture.uc.universe
        rec.instance()
        moved = differs_from_normalized(universe, fixture_morphisms(universe, _objects(2) + [universe.base]))
        identity_key = Mor.identity(universe.base)
        rec.note(f"{len(moved)} chosen squares differ from the normalized ones")
        if len(universe.total) >= 2:
            rec.expect(not universe.is_normalized_at(identity_key),
                       "Q(Id_U) is still the normalized leg under the skew")
        verdicts = {}
        for label, context in (("normalized", normalized), ("skewed", skewed)):
            tasks = compared_tasks(context, options)
            verdicts[label] = [(r.check_id, r.status.value) for t in tasks for r in t.run()]
        rec.instance(len(verdicts["normalized"]))
        for left, right in zip(verdicts["normalized"], verdicts["skewed"]):
            rec.expect(left == right, "verdict differs between choosers", normalized=left, skewed=right)
        rec.expect(len(verdicts["normalized"]) == len(verdicts["skewed"]), "different numbers of checks ran")
        tables = (chooser_tables(normalized, options), chooser_tables(skewed, options))
        for key in tables[0]:
            rec.instance()
            rec.expect(tables[0][key] == tables[1][key], f"canonical {key} table differs between choosers", table=key)
    return rec.result()


def skew_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    return [Task("skew", "independence", lambda: [check_skew_independence(ctx, options)])]


def run_defect(ctx: VerificationContext, defect: Defect, options: SuiteOptions) -> CheckResult:
    """Passes when the defect makes its anchor fail."""
    check_id = f"defect.{defect.name}"
    description = f"{defect.description} is reported under {defect.anchor}"
    try:
        results = defect.run(ctx, options)
    except FixtureError as e:
        logger.info(f"{check_id}: not applicable to {ctx.name}: {e}")
        return skipped_result(check_id, description, f"not applicable: {e}")
    with CheckRecorder(check_id, description, options.max_instances) as rec:
        rec.instance()
        matching = [r for r in results if r.check_id == defect.anchor]
        rec.expect(any(r.failed for r in matching), f"{defect.anchor} was not reported as failed",
                   reported=[(r.check_id, r.status.value) for r in results])
        rec.note(f"reported: {', '.join(f'{r.check_id}={r.status.value}' for r in results)}")
    return rec.result()


def negative_tasks(ctx: VerificationContext, options: SuiteOptions) -> List[Task]:
    return [
        Task("negative", name, (lambda defect=defect: [run_defect(ctx, defect, options)]))
        for name, defect in DEFECTS.items()
    ]


SUITE_BUILDERS: Dict[str, Callable[[VerificationContext, SuiteOptions], List[Task]]] = {
    "category": category_tasks,
    "lcc": lcc_tasks,
    "csystem": csystem_tasks,
    "juniv": juniv_tasks,
    "transfer": transfer_tasks,
    "lifting": lifting_tasks,
    "functors": functors_tasks,
    "skew": skew_tasks,
    "negative": negative_tasks,
}


def resolve_suites(selector: str) -> List[str]:
    if selector == "all":
        return list(SUITE_ORDER)
    names = [name.strip() for name in selector.split(",") if name.strip()]
    unknown = [name for name in names if name not in SUITE_BUILDERS]
    if unknown or not names:
        raise FixtureError(f"unknown suite {selector!r}; expected one of {', '.join(SUITE_CHOICES)}")
    return [name for name in SUITE_ORDER if name in names]


def plan(ctx: VerificationContext, suites: Sequence[str], options: SuiteOptions) -> List[Task]:
    """Tasks in canonical order; an injected defect adds its own task at the end."""
    tasks = [task for suite in suites for task in SUITE_BUILDERS[suite](ctx, options)]
    if ctx.defect is not None:
        defect = ctx.defect
        tasks.append(Task("defect", defect.name, lambda: defect.run(ctx, options)))
    return tasks


def run_tasks(ctx: VerificationContext, tasks: Sequence[Task], options: SuiteOptions, suite_label: str,
              progress: Optional[Callable[[List[CheckResult]], None]] = None) -> Report:
    """
    Run the tasks and assemble the report in planned order.

    Raises:
        MaterializationError: a construction exceeded the materialization cap
    """
    logger.info(f"Running {len(tasks)} tasks on {ctx.name} with {options.threads} threads")
    with ThreadPool(options.threads) as pool:
        outcomes = pool.execute([(task.run, [], {}) for task in tasks], progress_callback=progress)
    report = Report(
        fixture=ctx.name,
        suite=suite_label,
        bounds={"csystem": options.bound, "axioms": options.axiom_bound, "lifting": options.lifting_bound},
    )
    for results in outcomes:
        report.extend(results)
    summary = report.summary()
    logger.info(f"{ctx.name}: {summary['pass']} passed, {summary['fail']} failed, {summary['skipped']} skipped")
    if not report.passed:
        logger.warning(f"Failed checks: {', '.join(report.failed_ids())}")
    return report


def run_suites(ctx: VerificationContext, selector: str = "all", options: Optional[SuiteOptions] = None,
               progress: Optional[Callable[[List[CheckResult]], None]] = None) -> Report:
    options = options or SuiteOptions.from_document(ctx.document)
    suites = resolve_suites(selector)
    return run_tasks(ctx, plan(ctx, suites, options), options, selector, progress)
