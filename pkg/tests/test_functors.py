import pytest

from core.category.fincat import Mor
from core.exceptions import CompatibilityError, FixtureError
from core.models.fixtures import code_map_functor, identity_functor
from core.universe.functors import (
    FACE_LABEL_NOTE,
    TwoUniverseSetup,
    UnivCatFunctor,
    check_h,
    check_h_j_compat,
    check_two_universe,
    check_ucfunctor,
    h_of,
)

UCFUNCTOR_IDS = [
    "fincat.functor",
    "2015.04.06.eq10",
    "2015.04.10.l5",
    "2015.04.10.l6",
    "2015.04.06.l5",
    "2015.04.06.def4",
    "2015.04.06.def5",
    "2015.04.06.def6",
    "2015.04.06.l4",
    "2015.04.06.l6",
    "2015.04.10.l7",
]


@pytest.fixture(scope="module")
def id3(u3):
    return identity_functor(u3)


class TestUnivCatFunctor:
    def test_phi_must_have_the_right_shape(self, u3):
        uc = u3.uc
        with pytest.raises(CompatibilityError):
            UnivCatFunctor.between(uc, uc, Mor.identity(uc.total), Mor.identity(uc.total))

    def test_comparison_is_identity_for_the_identity_functor(self, id3, u3):
        F = Mor.constant(u3.uc.total, u3.uc.base, "2")
        comparison = id3.functor.comparison(F)
        assert comparison.is_identity()
        assert id3.functor.iota(F).is_identity()

    def test_chi_lands_in_i_p(self, id3, u3):
        chi = id3.functor.chi(u3.uc.base)
        assert chi.cod == u3.uc.lcc.i_p(u3.uc.p, u3.uc.base).obj
        assert chi.is_bijective()

    def test_code_map_must_be_total(self, u3, incl):
        with pytest.raises(FixtureError):
            code_map_functor("partial", incl.source, u3, {"0": "0"})

    def test_code_map_must_fit_the_fibers(self, u3, incl):
        with pytest.raises(FixtureError):
            code_map_functor("squeeze", incl.source, u3, {"0": "0", "1": "0"})

    def test_setup_needs_g_over_u(self, id3, u3):
        wrong = Mor.constant(u3.uc.total, u3.uc.total, ("1", 0))
        with pytest.raises(CompatibilityError):
            TwoUniverseSetup(id3.functor, id3.functor, wrong, Mor.identity(u3.uc.total))


class TestChecks:
    @pytest.mark.parametrize("name", ["id3", "incl"])
    def test_ucfunctor(self, name, request):
        fixture = request.getfixturevalue(name)
        results = check_ucfunctor(fixture.functor, 1, fixture.data)
        assert [r.check_id for r in results] == UCFUNCTOR_IDS
        assert [r.check_id for r in results if r.failed] == []

    def test_two_universe(self, id3):
        results = check_two_universe(id3.data, 1)
        assert [r.check_id for r in results] == [
            "2015.04.08.l1", "2015.04.06.l7", "2015.04.10.th3", "2015.04.10.th1"]
        assert all(r.passed for r in results)
        assert FACE_LABEL_NOTE in results[-1].notes

    def test_two_universe_counts_only_the_faces(self, id3):
        result = check_two_universe(id3.data, 1)[-1]
        assert result.instances == 1 + len(id3.data.setup.faces())
        assert result.counterexamples == []

    def test_identity_homomorphism(self, id3, cc3):
        h = h_of(id3.functor, cc3, cc3)
        gamma = cc3.objects_of_length(2)[-1]
        assert h.ob(gamma) == gamma
        assert h.psi(gamma).is_identity()
        results = check_h(h, 2)
        assert [r.check_id for r in results] == ["csystem.homomorphism", "2015.05.10.l1"]
        assert all(r.passed for r in results)

    def test_inclusion_homomorphism(self, incl):
        h = h_of(incl.functor)
        results = check_h(h, 2)
        assert all(r.passed for r in results)
        assert h.target.length(h.ob(h.source.objects_of_length(1)[-1])) == 1

    def test_h_preserves_the_transferred_j(self, id3):
        results = check_h_j_compat(id3.data, 1)
        assert [r.check_id for r in results] == [
            "2015.04.06.def4", "2015.04.06.def5", "2015.04.06.def6",
            "2015.04.12.l1", "2015.04.12.l2", "2015.04.12.l3", "2015.04.06.l3", "2015.05.06.l3"]
        assert all(r.passed for r in results)
