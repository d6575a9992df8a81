import pytest

from core.category.fincat import PT, FinSet, Mor
from core.csystem.cc_univ import (
    PT_OBJECT,
    CCMor,
    check_q_equation,
    check_u1,
    check_u1_naturality,
    object_counts,
)
from core.csystem.csystem import (
    CorruptedCSystem,
    CSystemHomomorphism,
    check_csystem_axioms,
    check_homomorphism,
)
from core.exceptions import CSystemError


def code_object(cc, code):
    return cc.make_object([Mor(PT, cc.universe.base, (code,))])


class TestObjects:
    @pytest.mark.parametrize("name", ["cc3", "cc3_skewed"])
    def test_counts(self, name, request):
        cc = request.getfixturevalue(name)
        assert object_counts(cc, 2) == {0: 1, 1: 3, 2: 13}

    def test_extensions(self, cc3):
        assert len(cc3.extensions(code_object(cc3, "2"))) == 9
        assert len(cc3.extensions(code_object(cc3, "0"))) == 1
        assert cc3.extensions(PT_OBJECT) == cc3.objects_of_length(1)

    def test_int(self, cc3):
        gamma = code_object(cc3, "2")
        assert len(cc3.int_obj(gamma)) == 2
        assert cc3.int_obj(PT_OBJECT) == PT

    def test_entries_must_chain(self, cc3):
        with pytest.raises(CSystemError):
            cc3.make_object([Mor(FinSet.skeletal(1), cc3.universe.base, ("1",))])

    def test_pt(self, cc3):
        assert cc3.ft(PT_OBJECT) == PT_OBJECT
        with pytest.raises(CSystemError):
            cc3.proj(PT_OBJECT)
        assert list(cc3.sections(PT_OBJECT)) == []

    def test_composition_needs_matching_objects(self, cc3):
        a, b = code_object(cc3, "1"), code_object(cc3, "2")
        with pytest.raises(CSystemError):
            cc3.identity(a).then(cc3.identity(b))

    def test_describe(self, cc3):
        gamma = code_object(cc3, "1")
        assert cc3.identity(gamma).describe()["dom"] == 1
        assert len(gamma.describe()) == 1


class TestDerivedOperations:
    def test_delta_is_a_section(self, cc3_skewed):
        cc = cc3_skewed
        for T in cc.objects_of_length(1) + cc.objects_of_length(2):
            delta = cc.delta(T)
            assert cc.is_section(delta)
            assert cc.ft(delta.target) == T

    def test_sections_count(self, cc3):
        T = code_object(cc3, "2")
        assert len(list(cc3.sections(T))) == 2
        assert all(cc3.is_section(s) for s in cc3.sections(T))

    def test_ft_n_and_depth(self, cc3):
        X = cc3.objects_of_length(2)[-1]
        assert cc3.ft_n(X, 2) == PT_OBJECT
        assert cc3.depth(X, PT_OBJECT) == 2
        with pytest.raises(CSystemError):
            cc3.ft_n(X, 3)
        with pytest.raises(CSystemError):
            cc3.depth(X, code_object(cc3, "0"))

    def test_pullback_along_identity(self, cc3_skewed):
        cc = cc3_skewed
        X = cc.objects_of_length(2)[-1]
        identity = cc.identity(cc.ft(X))
        assert cc.pullback_object(identity, X, 1) == X
        assert cc.pullback_object(cc.identity(X), X, 0) == X
        assert cc.pullback_morphism(identity, cc.identity(X), 1, 1) == cc.identity(X)

    def test_pullback_depth_mismatch(self, cc3):
        X = cc3.objects_of_length(2)[-1]
        with pytest.raises(CSystemError):
            cc3.pullback_object(cc3.identity(code_object(cc3, "0")), X, 1)
        with pytest.raises(CSystemError):
            cc3.pullback_section(cc3.identity(X), next(cc3.sections(X)), 0)

    def test_s_of_needs_positive_length(self, cc3):
        with pytest.raises(CSystemError):
            cc3.s_of(cc3.identity(PT_OBJECT))


class TestAxioms:
    @pytest.mark.parametrize("name", ["cc3", "cc3_skewed", "cc1"])
    def test_universe_c_system(self, name, request):
        cc = request.getfixturevalue(name)
        result = check_csystem_axioms(cc, bound=2, source_bound=1)
        assert result.check_id == "csystem.axioms"
        assert result.passed

    def test_corrupted_ft_fails(self, cc3):
        victim = cc3.objects_of_length(2)[-1]
        wrong = next(gamma for gamma in cc3.objects_of_length(1) if gamma != victim.parent)
        result = check_csystem_axioms(CorruptedCSystem(cc3, victim, wrong), bound=2, source_bound=1)
        assert result.failed

    def test_identity_homomorphism(self, cc3):
        result = check_homomorphism(CSystemHomomorphism.identity(cc3), bound=2, source_bound=1)
        assert result.check_id == "csystem.homomorphism"
        assert result.passed

    def test_collapsing_homomorphism_fails(self, cc3):
        h = CSystemHomomorphism(cc3, cc3, lambda gamma: PT_OBJECT, lambda f: cc3.identity(PT_OBJECT), name="collapse")
        assert check_homomorphism(h, bound=1, source_bound=1).failed

    def test_homomorphism_moving_an_identity(self, cc3):
        two = code_object(cc3, "2")
        swap = next(f for f in cc3.hom(two, two) if f != cc3.identity(two))
        h = CSystemHomomorphism(cc3, cc3, lambda gamma: gamma,
                                lambda f: swap if f == cc3.identity(two) else f, name="moved identity")
        result = check_homomorphism(h, bound=1, source_bound=1)
        assert result.failed
        assert result.counterexamples[0]["message"] == "identity not preserved"

    def test_homomorphism_breaking_a_composite_through_the_point(self, cc3):
        one, two = code_object(cc3, "1"), code_object(cc3, "2")
        constant, other = list(cc3.hom(one, two))
        h = CSystemHomomorphism(cc3, cc3, lambda gamma: gamma,
                                lambda f: other if f == constant else f, name="moved constant")
        result = check_homomorphism(h, bound=1, source_bound=1)
        assert result.failed
        assert {c["message"] for c in result.counterexamples} == {"composition not preserved"}

    @pytest.mark.slow
    def test_axioms_at_length_three(self, cc3):
        result = check_csystem_axioms(cc3, bound=3)
        assert result.passed
        assert result.complete


class TestUniverseCSystem:
    @pytest.mark.parametrize("name", ["cc3", "cc3_skewed"])
    def test_q_equation(self, name, request):
        result = check_q_equation(request.getfixturevalue(name), bound=2)
        assert result.check_id == "2015.04.02.eq2"
        assert result.passed

    @pytest.mark.parametrize("name", ["cc3", "cc3_skewed", "cc1"])
    def test_u1_bijections(self, name, request):
        cc = request.getfixturevalue(name)
        assert check_u1(cc, bound=2).passed
        assert check_u1_naturality(cc, bound=2).passed

    def test_u1_errors(self, cc3):
        with pytest.raises(CSystemError):
            cc3.u1(PT_OBJECT)
        with pytest.raises(CSystemError):
            cc3.u1_inv(PT_OBJECT, Mor.identity(cc3.universe.base))
        with pytest.raises(CSystemError):
            cc3.u1_tilde_inv(PT_OBJECT, Mor(PT, cc3.universe.base, ("1",)))

    def test_u1_tilde_roundtrip(self, cc3_skewed):
        cc = cc3_skewed
        o = Mor(PT, cc.universe.total, [("2", 1)])
        s = cc.u1_tilde_inv(PT_OBJECT, o)
        assert s.target == code_object(cc, "2")
        assert cc.u1_tilde(s) == o

    def test_encodings_do_not_depend_on_the_chooser(self, cc3, cc3_skewed):
        normalized = sorted(repr(cc3.encode_object(gamma)) for gamma in cc3.objects(2))
        skewed = sorted(repr(cc3_skewed.encode_object(gamma)) for gamma in cc3_skewed.objects(2))
        assert normalized == skewed

    def test_ccmor_realizes_its_table(self, cc3):
        gamma = code_object(cc3, "1")
        f = CCMor(gamma, gamma, Mor.identity(cc3.int_obj(gamma)))
        assert cc3.realize(f) == f.mor
        assert cc3.encode_mor(f) == (((("1", 0),), (("1", 0),)),)
