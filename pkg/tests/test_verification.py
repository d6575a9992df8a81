import os

import pytest

from config.settings import FIXTURE_DIR
from core.exceptions import CSystemError, FixtureError, MaterializationError
from core.models.documents import load_document, parse_document
from core.universe.lifting import TH1, TH2
from core.verification.defects import DEFECTS, get_defect
from core.verification.report import CheckRecorder, CheckStatus, Report, failed_result, skipped_result
from core.verification.suites import (
    CHOOSER_FREE_TASKS,
    SuiteOptions,
    VerificationContext,
    chooser_tables,
    compared_tasks,
    plan,
    resolve_suites,
    run_defect,
    run_suites,
    run_tasks,
)

FAST = dict(bound=1, axiom_bound=2, lifting_bound=2, threads=2)


def load(name):
    return load_document(os.path.join(FIXTURE_DIR, name))


@pytest.fixture(scope="module")
def ctx3():
    return VerificationContext(load("fix_u3.json"))


@pytest.fixture(scope="module")
def ctx1():
    return VerificationContext(load("fix_u1.json"))


class TestCheckRecorder:
    def test_clean_run_passes(self):
        with CheckRecorder("x", "nothing to see") as rec:
            rec.instance(3)
            rec.expect(True, "unused")
        result = rec.result()
        assert result.status == CheckStatus.PASS
        assert result.instances == 3
        assert result.complete

    def test_budget_marks_the_result_incomplete(self):
        with CheckRecorder("x", "too many", max_instances=2) as rec:
            for _ in range(5):
                rec.instance()
        result = rec.result()
        assert result.passed
        assert not result.complete
        assert "budget" in result.notes[0]

    def test_formal_error_becomes_a_violation(self):
        with CheckRecorder("x", "raises") as rec:
            raise CSystemError("no parent")
        result = rec.result()
        assert result.failed
        assert result.counterexamples[0]["message"] == "raised CSystemError: no parent"

    def test_materialization_error_propagates(self):
        with pytest.raises(MaterializationError):
            with CheckRecorder("x", "too big"):
                raise MaterializationError("cap")

    def test_counterexamples_are_capped(self):
        with CheckRecorder("x", "noisy", max_violations=2) as rec:
            for i in range(5):
                rec.violation("bad", index=i)
        result = rec.result()
        assert result.violation_count == 5
        assert [c["index"] for c in result.counterexamples] == [0, 1]

    def test_skip(self):
        with CheckRecorder("x", "not applicable") as rec:
            rec.skip("no fiber")
        assert rec.result().status == CheckStatus.SKIPPED


class TestReport:
    def test_summary_and_status(self):
        report = Report("F", "demo")
        report.extend([
            skipped_result("a", "a", "why"),
            failed_result("b", "b", "broken"),
            skipped_result("b", "b", "why"),
        ])
        assert report.summary() == {"pass": 0, "fail": 1, "skipped": 2, "total": 3, "incomplete": 0}
        assert not report.passed
        assert report.status_of("a") == CheckStatus.SKIPPED
        assert report.status_of("b") == CheckStatus.FAIL
        assert report.status_of("c") is None
        assert report.failed_ids() == ["b"]

    def test_to_dict_without_timing(self):
        report = Report("F", "demo", bounds={"lifting": 2, "csystem": 1})
        report.add(failed_result("b", "b", "broken"))
        data = report.to_dict(include_timing=False)
        assert data["metadata"]["format"] == "jcs-report/1"
        assert list(data["metadata"]["bounds"]) == ["csystem", "lifting"]
        assert "generated_at" not in data["metadata"]
        assert "elapsed_seconds" not in data["checks"][0]
        assert data["checks"][0]["status"] == "fail"


class TestPlanning:
    def test_resolve(self):
        assert resolve_suites("all")[0] == "category"
        assert resolve_suites("lcc, category") == ["category", "lcc"]
        with pytest.raises(FixtureError):
            resolve_suites("category,bogus")
        with pytest.raises(FixtureError):
            resolve_suites(",")

    def test_options_from_document(self):
        options = SuiteOptions.from_document(load("fix_u1.json"), bound=1, theorem=None)
        assert options.bound == 1
        assert options.class_pair == "inj-surj"
        assert options.theorem == TH2
        assert options.skew_seed == 7

    def test_context_under_another_seed(self):
        document = load("fix_defect_j_tweak.json")
        ctx = VerificationContext(document, skew=3)
        assert ctx.seed == 3
        assert ctx.defect.name == "j-tweak"
        rebuilt = ctx.rebuild(0)
        assert rebuilt.seed == 0
        assert rebuilt.defect is None

    def test_materialization_cap(self):
        data = {"name": "tight", "codes": [{"name": c, "fiber": 1} for c in "abc"],
                "options": {"max_set_size": 2}}
        with pytest.raises(MaterializationError):
            VerificationContext(parse_document(data))

    def test_unknown_defect(self):
        with pytest.raises(FixtureError):
            get_defect("nothing")


class TestSuites:
    @pytest.mark.parametrize("suite", ["category", "lcc", "csystem", "juniv", "transfer", "functors"])
    def test_suite_passes_on_fix_u3(self, ctx3, suite):
        report = run_suites(ctx3, suite, SuiteOptions(**FAST))
        assert report.results
        assert report.failed_ids() == []

    @pytest.mark.parametrize("suite", ["juniv", "transfer", "lifting", "functors"])
    def test_suite_passes_on_fix_u1(self, ctx1, suite):
        options = SuiteOptions.from_document(ctx1.document, **FAST)
        report = run_suites(ctx1, suite, options)
        assert report.failed_ids() == []

    def test_lifting_suite(self, ctx3):
        report = run_suites(ctx3, "lifting", SuiteOptions(theorem=TH1, **FAST))
        assert report.status_of(TH1) == CheckStatus.PASS
        assert report.status_of("2015.05.22.cond2") == CheckStatus.PASS
        assert report.status_of("2015.05.18.cor1") == CheckStatus.PASS

    def test_order_does_not_depend_on_threads(self, ctx3):
        one = run_suites(ctx3, "category,juniv", SuiteOptions(**{**FAST, "threads": 1}))
        four = run_suites(ctx3, "category,juniv", SuiteOptions(**{**FAST, "threads": 4}))
        assert [r.check_id for r in one.results] == [r.check_id for r in four.results]

    def test_progress_is_reported_per_task(self, ctx3):
        options = SuiteOptions(**FAST)
        tasks = plan(ctx3, ["juniv"], options)
        seen = []
        run_tasks(ctx3, tasks, options, "juniv", progress=seen.append)
        assert len(seen) == len(tasks)

    def test_compared_tasks_cover_lifting_and_functors(self, ctx3):
        tasks = compared_tasks(ctx3, SuiteOptions(**FAST))
        assert {"lifting", "functors"} <= {t.suite for t in tasks}
        assert not {(t.suite, t.name) for t in tasks} & CHOOSER_FREE_TASKS

    def test_tables_agree_between_choosers(self, ctx3):
        options = SuiteOptions(**FAST)
        normalized, skewed = chooser_tables(ctx3, options), chooser_tables(ctx3.rebuild(7), options)
        assert {"h-of", "derive-j"} <= set(normalized)
        assert normalized["derive-j"]["equals_extensional_jp"] is True
        assert normalized == skewed

    def test_failed_hypothesis_is_tabulated(self, ctx3):
        options = SuiteOptions(**{**FAST, "class_pair": "inj-surj"})
        assert chooser_tables(ctx3, options)["derive-j"] == {"hypothesis": "p ∈ FB"}

    @pytest.mark.slow
    def test_skew_independence(self, ctx3):
        report = run_suites(ctx3, "skew", SuiteOptions(**FAST))
        assert report.status_of("2015.03.29.rm1") == CheckStatus.PASS

    @pytest.mark.slow
    def test_lifting_suite_at_size_four(self, ctx1):
        options = SuiteOptions.from_document(ctx1.document, bound=1, threads=2)
        assert options.lifting_bound == 4
        report = run_suites(ctx1, "lifting", options)
        assert report.results
        assert report.failed_ids() == []


class TestDefects:
    @pytest.mark.parametrize("name", sorted(DEFECTS))
    def test_defect_trips_its_anchor(self, ctx3, name):
        result = run_defect(ctx3, DEFECTS[name], SuiteOptions(**FAST))
        assert result.check_id == f"defect.{name}"
        assert result.status == CheckStatus.PASS, result.counterexamples

    def test_derive_hypothesis_needs_a_non_surjective_p(self, ctx1):
        result = run_defect(ctx1, DEFECTS["derive-hypothesis"], SuiteOptions(**FAST))
        assert result.status == CheckStatus.SKIPPED

    @pytest.mark.parametrize("fixture, anchor", [
        ("fix_defect_corrupted_ft.json", "csystem.axioms"),
        ("fix_defect_j_tweak.json", "2015.04.04.l5"),
        ("fix_defect_omega_incompatible.json", "2015.04.06.def5"),
        ("fix_defect_phi_tilde_collapse.json", "2015.04.06.eq10"),
    ])
    def test_injected_defect_fails_the_report(self, fixture, anchor):
        ctx = VerificationContext(load(fixture))
        options = SuiteOptions(**FAST)
        report = run_tasks(ctx, plan(ctx, [], options), options, "none")
        assert not report.passed
        assert report.status_of(anchor) == CheckStatus.FAIL
