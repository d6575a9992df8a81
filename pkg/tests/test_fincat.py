import pytest

from core.category.fincat import (
    FINSET,
    PT,
    Arrow,
    CommSquare,
    FinSet,
    FunctorData,
    LegIndex,
    Mor,
    TableCategory,
    check_category_axioms,
    check_functor,
    is_final,
    is_set_pullback,
    mediate,
    verify_pullback,
)
from core.category.lcc import FinSetLCC
from core.exceptions import (
    CompositionError,
    MaterializationError,
    MorphismError,
    NonCommutingSquareError,
    PullbackError,
)
from utils.concurrency import ThreadPool


def z3(corrupt: bool = False) -> TableCategory:
    names = ["e", "a", "b"]
    composition = {(names[i], names[j]): names[(i + j) % 3] for i in range(3) for j in range(3)}
    if corrupt:
        composition[("a", "a")] = "e"
    return TableCategory(["*"], [Arrow(n, "*", "*") for n in names], composition, {"*": "e"})


class TestFinSet:
    def test_elements_are_sorted_canonically(self):
        s = FinSet(["b", (0, 1), 1, "a", 0])
        assert s.elements == (0, 1, "a", "b", (0, 1))

    def test_equality_ignores_name(self):
        assert FinSet([2, 0, 1], name="three") == FinSet.skeletal(3)
        assert hash(FinSet([2, 0, 1], name="three")) == hash(FinSet.skeletal(3))
        assert FinSet([0, 1]) != FinSet.skeletal(3)

    def test_label(self):
        assert FinSet.skeletal(3).label == "3[3]"
        assert PT.label == "pt[1]"

    def test_materialize_cap(self):
        assert len(FinSet.materialize(range(4), "x", limit=4)) == 4
        with pytest.raises(MaterializationError):
            FinSet.materialize(range(5), "x", limit=4)

    def test_index_of_missing_element(self):
        with pytest.raises(MorphismError):
            FinSet.skeletal(2).index(7)


class TestMor:
    def test_table_must_match_domain(self):
        with pytest.raises(MorphismError):
            Mor(FinSet.skeletal(2), FinSet.skeletal(1), (0,))

    def test_image_must_lie_in_codomain(self):
        with pytest.raises(MorphismError):
            Mor(FinSet.skeletal(2), FinSet.skeletal(1), (0, 5))

    def test_composition_is_diagrammatic(self):
        two, three = FinSet.skeletal(2), FinSet.skeletal(3)
        f = Mor(two, three, (0, 2))
        g = Mor(three, two, (1, 1, 0))
        assert f.then(g).table == (1, 0)
        assert (f >> g) == f.then(g)

    def test_composition_needs_matching_endpoints(self):
        two = FinSet.skeletal(2)
        with pytest.raises(CompositionError):
            Mor.identity(two).then(Mor.identity(PT))

    def test_predicates_and_inverse(self):
        two = FinSet.skeletal(2)
        swap = Mor(two, two, (1, 0))
        assert swap.is_bijective() and not swap.is_identity()
        assert swap.inverse() == swap
        assert swap.then(swap).is_identity()
        collapse = Mor.constant(two, two, 0)
        assert not collapse.is_injective() and not collapse.is_surjective()
        with pytest.raises(MorphismError):
            collapse.inverse()

    def test_fiber_and_mapping(self):
        f = Mor.from_mapping(FinSet("xyz"), FinSet.skeletal(2), {"x": 0, "y": 1, "z": 0})
        assert f.fiber(0) == ("x", "z")
        assert f("y") == 1
        assert f.image() == FinSet.skeletal(2)
        with pytest.raises(MorphismError):
            Mor.from_mapping(FinSet("xy"), FinSet.skeletal(2), {"x": 0})

    def test_describe(self):
        f = Mor(FinSet.skeletal(1), FinSet.skeletal(2), (1,))
        assert f.describe() == {"dom": "1[1]", "cod": "2[2]", "table": [[0, 1]]}


class TestFinSetCategory:
    def test_objects(self):
        objects = FINSET.objects()
        assert objects == [FinSet.skeletal(0), FinSet.skeletal(1), FinSet.skeletal(2), PT]
        assert FINSET.objects(2) == objects[:2]

    def test_hom_enumeration(self):
        two, three = FinSet.skeletal(2), FinSet.skeletal(3)
        homs = list(FINSET.hom(two, three))
        assert len(homs) == FINSET.hom_size(two, three) == 9
        assert len(set(homs)) == 9
        assert list(FINSET.hom(FinSet.skeletal(0), three)) == [Mor(FinSet.skeletal(0), three, ())]
        assert list(FINSET.hom(two, FinSet.skeletal(0))) == []

    def test_terminal(self):
        assert FINSET.to_terminal(FinSet.skeletal(3)).cod == PT

    def test_is_final(self):
        assert is_final(FINSET, PT)
        assert not is_final(FINSET, FinSet.skeletal(2))
        assert not is_final(FINSET, FinSet.skeletal(0))
        assert not is_final(z3(), "*")

    def test_axioms_hold(self):
        result = check_category_axioms(FINSET)
        assert result.passed
        assert result.check_id == "fincat.axioms"
        assert result.instances > 0


class TestTableCategory:
    def test_z3_satisfies_the_axioms(self):
        assert check_category_axioms(z3()).passed

    def test_corrupted_entry_breaks_associativity(self):
        result = check_category_axioms(z3(corrupt=True))
        assert result.failed
        assert any(c["message"] == "associativity fails" for c in result.counterexamples)

    def test_missing_entry_is_a_composition_error(self):
        category = TableCategory(["*"], [Arrow("e", "*", "*")], {}, {"*": "e"})
        with pytest.raises(CompositionError):
            category.compose(category.identity("*"), category.identity("*"))


class TestPullbacks:
    def test_fiber_product_is_a_pullback(self):
        lcc = FinSetLCC()
        f = Mor(FinSet.skeletal(2), FinSet.skeletal(2), (0, 0))
        p = Mor(FinSet.skeletal(3), FinSet.skeletal(2), (0, 1, 0))
        square = lcc.fiber_product(f, p).square
        assert verify_pullback(square)
        assert is_set_pullback(square)

    def test_doubled_apex_is_not_a_pullback(self):
        one, two = FinSet.skeletal(1), FinSet.skeletal(2)
        square = CommSquare(
            top=Mor.constant(two, one, 0),
            left=Mor.constant(two, one, 0),
            right=Mor.identity(one),
            bottom=Mor.identity(one),
        )
        assert square.commutes()
        assert not verify_pullback(square)
        assert not is_set_pullback(square)

    def test_non_commuting_square_raises(self):
        one, two = FinSet.skeletal(1), FinSet.skeletal(2)
        square = CommSquare(
            top=Mor.identity(one),
            left=Mor.identity(one),
            right=Mor.constant(one, two, 0),
            bottom=Mor.constant(one, two, 1),
        )
        with pytest.raises(NonCommutingSquareError):
            verify_pullback(square)

    def test_edges_must_meet(self):
        one, two = FinSet.skeletal(1), FinSet.skeletal(2)
        with pytest.raises(MorphismError):
            CommSquare(Mor.identity(one), Mor.identity(two), Mor.identity(one), Mor.identity(one))

    def test_mediate(self):
        lcc = FinSetLCC()
        f = Mor(FinSet.skeletal(2), FinSet.skeletal(2), (0, 1))
        p = Mor(FinSet.skeletal(3), FinSet.skeletal(2), (0, 1, 0))
        choice = lcc.fiber_product(f, p)
        u = Mor(PT, f.dom, (0,))
        v = Mor(PT, p.dom, (2,))
        m = mediate(choice.pr1, choice.pr2, u, v)
        assert m.then(choice.pr1) == u and m.then(choice.pr2) == v

    def test_leg_index_is_shared_between_threads(self):
        lcc = FinSetLCC()
        f = Mor(FinSet.skeletal(2), FinSet.skeletal(2), (0, 1))
        p = Mor(FinSet.skeletal(3), FinSet.skeletal(2), (0, 1, 0))
        choice = lcc.fiber_product(f, p)
        legs = LegIndex()
        u, v = Mor(PT, f.dom, (0,)), Mor(PT, p.dom, (2,))
        with ThreadPool(4) as pool:
            results = pool.execute([(mediate, [choice.pr1, choice.pr2, u, v, legs], {}) for _ in range(8)])
        assert all(m == mediate(choice.pr1, choice.pr2, u, v) for m in results)
        assert len(legs) == 1

    def test_mediate_without_a_point(self):
        lcc = FinSetLCC()
        f = Mor(FinSet.skeletal(2), FinSet.skeletal(2), (0, 1))
        p = Mor(FinSet.skeletal(3), FinSet.skeletal(2), (0, 1, 0))
        choice = lcc.fiber_product(f, p)
        with pytest.raises(PullbackError):
            mediate(choice.pr1, choice.pr2, Mor(PT, f.dom, (0,)), Mor(PT, p.dom, (1,)))


class TestFunctors:
    def test_identity_functor(self):
        lcc = FinSetLCC()
        square = lcc.fiber_product(Mor.identity(FinSet.skeletal(2)), Mor.identity(FinSet.skeletal(2))).square
        result = check_functor(FunctorData.identity(), bound=3, squares=[square])
        assert result.passed
        assert result.check_id == "fincat.functor"

    def test_wrong_image_is_reported(self):
        two = FinSet.skeletal(2)
        victim = Mor(two, two, (0, 0))
        functor = FunctorData(FINSET, FINSET, lambda x: x, lambda f: Mor.identity(two) if f == victim else f)
        result = check_functor(functor, bound=3)
        assert result.failed
        assert any(c["message"] == "composition not preserved" for c in result.counterexamples)
