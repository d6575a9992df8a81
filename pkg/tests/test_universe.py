import numpy as np
import pytest

from core.category.fincat import PT, FinSet, Mor, verify_pullback
from core.exceptions import UniverseError
from core.universe.universe import (
    EUniverse,
    NormalizedChooser,
    SkewedChooser,
    check_chosen_squares,
    check_delta,
    check_e_universe,
    check_q_laws,
    check_star_square,
    differs_from_normalized,
    fixture_morphisms,
)
from core.verification.defects import SwappedEUniverse

SMALL = [FinSet.skeletal(n) for n in range(3)]


class TestChoosers:
    def test_normalized_apex(self, u3):
        p = u3.uc.p
        F = Mor(FinSet.skeletal(2), u3.uc.base, ("2", "1"))
        apex, proj, q = NormalizedChooser().choose(p, F)
        assert apex.elements == ((0, ("2", 0)), (0, ("2", 1)), (1, ("1", 0)))
        assert proj.then(F) == q.then(p)

    def test_skewed_permutation_is_deterministic(self, u3):
        F = Mor(FinSet.skeletal(2), u3.uc.base, ("2", "2"))
        chooser = SkewedChooser(7)
        sigma = chooser.permutation(4, F)
        assert not np.array_equal(sigma, np.arange(4))
        assert np.array_equal(sigma, SkewedChooser(7).permutation(4, F))
        assert sorted(sigma.tolist()) == [0, 1, 2, 3]

    def test_seed_zero_is_normalized(self, u3):
        F = Mor(FinSet.skeletal(2), u3.uc.base, ("2", "2"))
        assert np.array_equal(SkewedChooser(0).permutation(4, F), np.arange(4))
        assert np.array_equal(SkewedChooser(7).permutation(1, F), np.arange(1))


class TestUniverseStructure:
    def test_ext_is_memoized(self, u3):
        universe = u3.uc.universe
        F = Mor(PT, universe.base, ("2",))
        assert universe.ext(F) is universe.ext(F)
        assert len(universe.ext(F).apex) == 2

    def test_ext_needs_a_morphism_into_u(self, u3):
        with pytest.raises(UniverseError):
            u3.uc.universe.ext(Mor.identity(FinSet.skeletal(1)))

    def test_pair_needs_a_commuting_cone(self, u3):
        universe = u3.uc.universe
        F = Mor(PT, universe.base, ("2",))
        with pytest.raises(UniverseError):
            universe.pair(F, Mor.identity(PT), Mor(PT, universe.total, [("1", 0)]))

    def test_pair_satisfies_its_equations(self, u3_skewed):
        universe = u3_skewed.uc.universe
        F = Mor(PT, universe.base, ("2",))
        g = Mor(PT, universe.total, [("2", 1)])
        paired = universe.pair(F, Mor.identity(PT), g)
        square = universe.ext(F)
        assert paired.then(square.proj) == Mor.identity(PT)
        assert paired.then(square.q) == g

    def test_delta_is_the_diagonal_when_normalized(self, u3):
        universe = u3.uc.universe
        delta = universe.delta()
        assert all(delta(x) == (x, x) for x in universe.total.elements)

    def test_skewed_squares_differ(self, u3, u3_skewed):
        objects = u3.uc.small_objects()
        assert differs_from_normalized(u3.uc.universe, fixture_morphisms(u3.uc.universe, objects)) == []
        moved = differs_from_normalized(u3_skewed.uc.universe, fixture_morphisms(u3_skewed.uc.universe, objects))
        assert moved
        assert all(len(u3_skewed.uc.universe.ext(F).apex) >= 2 for F in moved)

    def test_with_chooser_keeps_p(self, u3):
        skewed = u3.uc.universe.with_chooser(SkewedChooser(3))
        assert skewed.p == u3.uc.p
        assert skewed.chooser.name == "skewed"
        assert skewed.squares() == []


class TestUniverseCategory:
    def test_small_objects_and_points(self, u3):
        assert u3.uc.small_objects(1) == [FinSet.skeletal(0), FinSet.skeletal(1), PT]
        assert [F.table for F in u3.uc.points()] == [("0",), ("1",), ("2",)]

    def test_sizes(self, u3, u1):
        assert (len(u3.uc.base), len(u3.uc.total)) == (3, 3)
        assert (len(u1.uc.base), len(u1.uc.total)) == (2, 2)
        assert len(u3.uc.universe.ext(u3.uc.p).apex) == 5


class TestChecks:
    @pytest.mark.parametrize("name", ["u3", "u3_skewed", "u1"])
    def test_chosen_squares_are_pullbacks(self, name, request):
        uc = request.getfixturevalue(name).uc
        morphisms = fixture_morphisms(uc.universe, uc.small_objects())
        assert check_chosen_squares(uc.universe, morphisms).passed

    @pytest.mark.parametrize("name", ["u3", "u3_skewed"])
    def test_q_laws_and_delta(self, name, request):
        universe = request.getfixturevalue(name).uc.universe
        assert check_q_laws(universe, SMALL).passed
        assert check_delta(universe).passed

    def test_star_square_between_choosers(self, u3, u3_skewed):
        universe, source = u3.uc.universe, u3_skewed.uc.universe
        result = check_star_square(universe, source, Mor.identity(universe.total), SMALL)
        assert result.check_id == "2015.04.20.l1"
        assert result.passed

    def test_star_needs_a_morphism_over_u(self, u3):
        universe = u3.uc.universe
        wrong = Mor.constant(universe.total, universe.total, ("1", 0))
        with pytest.raises(UniverseError):
            universe.star(Mor(PT, universe.base, ("2",)), wrong, universe)


class TestEUniverse:
    @pytest.mark.parametrize("name", ["u3", "u3_skewed"])
    def test_squares_match_components(self, name, request):
        e = request.getfixturevalue(name).ju.e
        result = check_e_universe(e, SMALL)
        assert result.check_id == "2015.05.08.constr1"
        assert result.passed

    def test_total_space(self, u3):
        e = u3.ju.e
        assert len(e.total) == 3
        assert e.base == u3.uc.base

    def test_eq_must_start_at_the_fiber_square(self, u3):
        with pytest.raises(UniverseError):
            EUniverse(u3.uc.universe, Mor.identity(u3.uc.base))

    def test_coordinates_identify_elements(self, u3_skewed):
        e = u3_skewed.ju.e
        coordinates = [e.coordinates(x) for x in e.total]
        assert len(set(coordinates)) == len(e.total)
        assert all(e.p(x) == e.base_universe.p(c[0]) for x, c in zip(e.total, coordinates))

    @pytest.mark.parametrize("name", ["u3", "u3_skewed"])
    def test_swapped_q_is_still_a_pullback_but_fails(self, name, request):
        e = request.getfixturevalue(name).ju.e
        broken = SwappedEUniverse(e.base_universe, e.Eq)
        identity = Mor.identity(broken.base)
        assert verify_pullback(broken.ext(identity).square)
        result = check_e_universe(broken, [broken.base])
        assert result.failed
        assert {c["message"] for c in result.counterexamples} == {"Q(F)_E differs from Q(Q(Q(F),p),Eq)"}
