import pytest

from core.category.fincat import FinSet, Mor
from core.exceptions import HypothesisError, NonCommutingSquareError
from core.universe.juniv import check_univ_j
from core.universe.lifting import (
    ALL_MORPHISMS,
    CLASS_PAIRS,
    INJECTIONS,
    ISOMORPHISMS,
    SURJECTIONS,
    TH1,
    TH2,
    LiftProblem,
    check_conditions,
    check_derive_j,
    check_fibrancy_lemmas,
    derive_j,
    derive_j_from_model_structure,
    fiber_profile,
    find_lift,
    has_rlp,
    is_fibrant,
    lift_problems,
    rlp_counterexample,
)

ZERO, ONE, TWO = (FinSet.skeletal(n) for n in range(3))


class TestFindLift:
    def test_forced_and_free_values(self):
        problem = LiftProblem(
            i=Mor(ONE, TWO, (0,)),
            p=Mor.constant(TWO, ONE, 0),
            f_Z=Mor(ONE, TWO, (1,)),
            f_W=Mor.constant(TWO, ONE, 0),
        )
        lift = find_lift(problem)
        assert lift.table == (1, 0)
        assert problem.is_solution(lift)

    def test_conflicting_constraints(self):
        problem = LiftProblem(
            i=Mor.constant(TWO, ONE, 0),
            p=Mor.constant(TWO, ONE, 0),
            f_Z=Mor.identity(TWO),
            f_W=Mor.identity(ONE),
        )
        assert find_lift(problem) is None

    def test_empty_fiber(self):
        problem = LiftProblem(
            i=Mor(ZERO, ONE, ()),
            p=Mor(ZERO, ONE, ()),
            f_Z=Mor(ZERO, ZERO, ()),
            f_W=Mor.identity(ONE),
        )
        assert find_lift(problem) is None

    def test_square_must_commute(self):
        problem = LiftProblem(
            i=Mor.identity(ONE),
            p=Mor.identity(TWO),
            f_Z=Mor(ONE, TWO, (0,)),
            f_W=Mor(ONE, TWO, (1,)),
        )
        with pytest.raises(NonCommutingSquareError):
            find_lift(problem)

    def test_lift_problems_commute(self):
        i, p = Mor(ONE, TWO, (0,)), Mor.constant(TWO, ONE, 0)
        problems = list(lift_problems(i, p))
        assert len(problems) == 2
        assert all(problem.commutes() for problem in problems)


class TestRLP:
    def test_surjections_lift_against_injections(self):
        assert has_rlp(Mor.constant(TWO, ONE, 0), INJECTIONS, 2)

    def test_non_surjection_has_a_counterexample(self):
        p = Mor(ONE, TWO, (0,))
        assert not has_rlp(p, INJECTIONS, 2)
        problem = rlp_counterexample(p, INJECTIONS, 2)
        assert problem.commutes() and find_lift(problem) is None

    def test_everything_lifts_against_isomorphisms(self):
        assert has_rlp(Mor(ONE, TWO, (0,)), ISOMORPHISMS, 2)

    def test_fiber_profile_ignores_labels(self):
        assert fiber_profile(Mor(TWO, TWO, (1, 0))) == fiber_profile(Mor.identity(TWO)) == (2, (1, 1))
        assert fiber_profile(Mor.constant(TWO, TWO, 1)) == (2, (0, 2))

    def test_fibrant(self):
        assert is_fibrant(ZERO, ALL_MORPHISMS)
        assert not is_fibrant(ZERO, SURJECTIONS)
        assert is_fibrant(TWO, SURJECTIONS)


class TestConditions:
    @pytest.mark.parametrize("name", ["iso-all", "inj-surj"])
    def test_cond2_holds(self, name):
        result = check_conditions(CLASS_PAIRS[name], "cond2", bound=2)
        assert result.check_id == "2015.05.22.cond2"
        assert result.passed

    def test_cond2_fails_for_injections_and_all(self):
        result = check_conditions(CLASS_PAIRS["inj-all"], "cond2", bound=2)
        assert result.failed
        assert any(c["message"] == "member of FB without the lifting property" for c in result.counterexamples)

    def test_rlp_clause_uses_the_full_bound(self):
        pair = CLASS_PAIRS["inj-surj"]
        at_two = check_conditions(pair, "cond2", bound=2)
        at_three = check_conditions(pair, "cond2", bound=3)
        assert at_three.passed
        assert at_three.instances - at_two.instances == 60 - 11
        assert at_three.notes == [
            "two-object clauses enumerated over sets of size ≤ 3; four-object clauses over size ≤ 2"]

    def test_cond1_rlp_clause_uses_the_full_bound(self):
        result = check_conditions(CLASS_PAIRS["inj-surj"], "cond1", bound=3)
        assert result.passed
        assert "sets of size ≤ 3" in result.notes[0]

    def test_cond1_holds_for_isomorphisms(self):
        result = check_conditions(CLASS_PAIRS["iso-all"], "cond1", bound=2)
        assert result.check_id == "2015.05.22.cond1"
        assert result.passed

    def test_unknown_condition_set(self):
        with pytest.raises(ValueError):
            check_conditions(CLASS_PAIRS["iso-all"], "cond3")

    def test_fibrancy_lemmas(self, u3):
        results = check_fibrancy_lemmas(CLASS_PAIRS["iso-all"], 2, universe_p=u3.uc.p)
        assert [r.check_id for r in results] == ["2015.05.14.l2", "2015.05.14.l4", "2015.05.14.l1", "2015.05.14.l3"]
        assert all(r.passed for r in results)


class TestDeriveJ:
    def test_first_theorem_recovers_the_extensional_jp(self, u3):
        ju = u3.ju
        bundle = derive_j(u3.uc, ju.Eq, ju.Omega, CLASS_PAIRS["iso-all"], TH1, bound=2)
        assert bundle.Jp == u3.bundle.Jp

    @pytest.mark.parametrize("name", ["u1", "u3_skewed"])
    def test_second_theorem(self, name, request):
        fixture = request.getfixturevalue(name)
        ju = fixture.ju
        bundle = derive_j(fixture.uc, ju.Eq, ju.Omega, CLASS_PAIRS["iso-all"], TH2, bound=2)
        assert ju.is_section_of_coj(bundle.Jp)
        assert bundle.Jp == fixture.bundle.Jp

    def test_non_surjective_p_is_not_a_fibration(self, u3):
        ju = u3.ju
        with pytest.raises(HypothesisError) as excinfo:
            derive_j(u3.uc, ju.Eq, ju.Omega, CLASS_PAIRS["inj-surj"], TH1, bound=2)
        assert excinfo.value.hypothesis == "p ∈ FB"

    def test_unknown_theorem(self, u3):
        with pytest.raises(ValueError):
            derive_j(u3.uc, u3.ju.Eq, u3.ju.Omega, CLASS_PAIRS["iso-all"], "th3", bound=2)

    def test_model_structure_picks_a_theorem(self, u3):
        ju = u3.ju
        bundle = derive_j_from_model_structure(u3.uc, ju.Eq, ju.Omega, ALL_MORPHISMS, ISOMORPHISMS, bound=2)
        assert bundle.Jp == u3.bundle.Jp

    def test_model_structure_without_conditions(self, u3):
        ju = u3.ju
        with pytest.raises(HypothesisError) as excinfo:
            derive_j_from_model_structure(u3.uc, ju.Eq, ju.Omega, ALL_MORPHISMS, INJECTIONS, bound=2)
        assert excinfo.value.hypothesis == "2015.05.18.cor1"

    def test_check_reports_against_the_theorem(self, u3):
        ju = u3.ju
        passing = check_derive_j(u3.uc, ju.Eq, ju.Omega, CLASS_PAIRS["iso-all"], TH1, bound=2)
        assert passing[0].check_id == TH1
        assert all(r.passed for r in passing)
        failing = check_derive_j(u3.uc, ju.Eq, ju.Omega, CLASS_PAIRS["inj-surj"], TH1, bound=2)
        assert len(failing) == 1
        assert failing[0].failed
        assert "p ∈ FB" in failing[0].counterexamples[0]["message"]


@pytest.mark.slow
class TestAcceptanceBounds:
    @pytest.mark.parametrize("name", ["iso-all", "inj-surj"])
    def test_cond2_on_sets_of_size_four(self, name, u3):
        result = check_conditions(CLASS_PAIRS[name], "cond2", bound=4, lcc=u3.uc.lcc)
        assert result.passed
        assert result.complete
        assert "sets of size ≤ 4" in result.notes[0]

    def test_cond2_fails_for_injections_and_all_at_size_four(self):
        assert check_conditions(CLASS_PAIRS["inj-all"], "cond2", bound=4).failed

    def test_first_theorem_at_size_four(self, u3):
        ju = u3.ju
        bundle = derive_j(u3.uc, ju.Eq, ju.Omega, CLASS_PAIRS["iso-all"], TH1, bound=4)
        assert all(r.passed for r in check_univ_j(ju, bundle))

    def test_second_theorem_at_size_four(self, u1):
        ju = u1.ju
        bundle = derive_j(u1.uc, ju.Eq, ju.Omega, CLASS_PAIRS["inj-surj"], TH2, bound=4)
        assert all(r.passed for r in check_univ_j(ju, bundle))

    @pytest.mark.parametrize("name", ["iso-all", "inj-surj"])
    def test_fibrancy_lemmas_at_size_four(self, name, u3):
        results = check_fibrancy_lemmas(CLASS_PAIRS[name], 4, u3.uc.lcc, universe_p=u3.uc.p)
        assert all(r.passed for r in results)
        assert all(r.instances > 0 for r in results)
