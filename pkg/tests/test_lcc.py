from math import prod

import pytest

from core.category.fincat import FINSET, PT, FinSet, Mor
from core.category.lcc import (
    DpElement,
    EtaBijection,
    FinSetLCC,
    check_adj,
    check_d_f_lemma,
    check_d_p_functoriality,
    check_eta,
    check_i_hom_naturality,
    check_i_p_functor,
    d_p_act,
    d_p_elements,
    eta,
    eta_bang,
    i_p_fiber_sizes,
)
from core.exceptions import LCCError, MaterializationError

SMALL = [FinSet.skeletal(n) for n in range(3)]


def fiber_product_size(f: Mor, p: Mor) -> int:
    return sum(len(p.fiber(b)) for b in f.table)


def slice_hom_size(p: Mor, q: Mor) -> int:
    return sum(len(q.fiber(a)) ** len(p.fiber(a)) for a in p.cod.elements)


class TestFiberProducts:
    def test_sizes_and_legs(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        f = Mor(FinSet.skeletal(3), u3.uc.base, ("2", "1", "2"))
        choice = lcc.fiber_product(f, p)
        assert len(choice.apex) == fiber_product_size(f, p) == 5
        assert choice.square.commutes()
        assert choice.diamond == choice.pr2.then(p)

    def test_memoized(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        assert lcc.fiber_product(p, p) is lcc.fiber_product(p, p)

    def test_cospan_must_share_a_base(self):
        lcc = FinSetLCC()
        with pytest.raises(LCCError):
            lcc.fiber_product(Mor.identity(FinSet.skeletal(1)), Mor.identity(FinSet.skeletal(2)))

    def test_pair_rejects_non_commuting_cone(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        choice = lcc.fiber_product(p, p)
        u = Mor(PT, p.dom, [("1", 0)])
        v = Mor(PT, p.dom, [("2", 0)])
        with pytest.raises(LCCError):
            choice.pair(u, v)

    def test_product(self):
        lcc = FinSetLCC()
        product = lcc.product(FinSet.skeletal(2), FinSet.skeletal(3))
        assert len(product.apex) == 6


class TestSliceHom:
    def test_i_p_sizes(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        for V in SMALL:
            hom = lcc.i_p(p, V)
            assert len(hom.obj) == slice_hom_size(p, lcc.product(p.cod, V).pr1)
            assert i_p_fiber_sizes(lcc, p, V) == {"0": 1, "1": len(V), "2": len(V) ** 2}

    def test_i_p_of_the_point_is_the_base(self, u3):
        lcc = FinSetLCC()
        assert set(i_p_fiber_sizes(lcc, u3.uc.p, PT).values()) == {1}

    def test_dependent_functions_count(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        hom = lcc.slice_hom(p, p)
        fibers = [len(p.fiber(a)) for a in p.cod.elements]
        assert len(hom.obj) == sum(n ** n for n in fibers)
        sections = [h for h in FINSET.hom(p.cod, hom.obj) if h.then(hom.proj).is_identity()]
        assert len(sections) == prod(n ** n for n in fibers)

    def test_cap(self, u3):
        lcc = FinSetLCC(max_set_size=8)
        with pytest.raises(MaterializationError):
            lcc.i_p(u3.uc.p, FinSet.skeletal(3))

    def test_adj_roundtrip(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        hom = lcc.i_p(p, FinSet.skeletal(2))
        for f in FINSET.hom(FinSet.skeletal(1), hom.obj):
            alpha = f.then(hom.proj)
            assert lcc.adj_inv(lcc.adj(f, hom), hom, alpha) == f

    def test_adj_of_identity_is_evaluation(self, u3):
        lcc = FinSetLCC()
        hom = lcc.i_p(u3.uc.p, FinSet.skeletal(2))
        assert lcc.adj(Mor.identity(hom.obj), hom) == hom.ev

    def test_i_p_preserves_identity(self, u3):
        lcc = FinSetLCC()
        V = FinSet.skeletal(2)
        assert lcc.i_p_mor(u3.uc.p, Mor.identity(V)).is_identity()

    def test_i_hom_needs_a_morphism_over_u(self, u3):
        lcc = FinSetLCC()
        p = u3.uc.p
        swap = Mor.from_mapping(p.dom, p.dom, {("1", 0): ("2", 0), ("2", 0): ("1", 0), ("2", 1): ("2", 1)})
        with pytest.raises(LCCError):
            lcc.i_hom(swap, p, p, FinSet.skeletal(1))


class TestEta:
    def test_bijection_on_small_objects(self, u3):
        universe, lcc = u3.uc.universe, u3.uc.lcc
        for X in SMALL:
            for V in SMALL:
                table = EtaBijection(universe, lcc, X, V)
                assert len(table) == len(list(FINSET.hom(X, lcc.i_p(universe.p, V).obj)))

    def test_d_p_counts(self, u3):
        universe = u3.uc.universe
        # F: pt → U picks a code c; a: (pt;F) → V has |V|^|fiber(c)| choices
        assert len(list(d_p_elements(universe, PT, FinSet.skeletal(2)))) == 1 + 2 + 4

    def test_eta_rejects_wrong_shape(self, u3):
        universe, lcc = u3.uc.universe, u3.uc.lcc
        F = Mor(PT, universe.base, ("2",))
        wrong = DpElement(F, Mor.constant(PT, FinSet.skeletal(1), 0))
        with pytest.raises(LCCError):
            eta(universe, lcc, wrong, FinSet.skeletal(1))

    def test_eta_bang_inverts_eta(self, u3_skewed):
        universe, lcc = u3_skewed.uc.universe, u3_skewed.uc.lcc
        V = FinSet.skeletal(2)
        for d in d_p_elements(universe, FinSet.skeletal(2), V):
            assert eta_bang(universe, lcc, eta(universe, lcc, d, V), V) == d

    def test_d_p_action_by_identity(self, u3):
        universe = u3.uc.universe
        X = FinSet.skeletal(2)
        for d in d_p_elements(universe, X, FinSet.skeletal(1)):
            assert d_p_act(universe, Mor.identity(X), d) == d


class TestChecks:
    @pytest.mark.parametrize("name", ["u3", "u3_skewed"])
    def test_eta_and_adj(self, name, request):
        fixture = request.getfixturevalue(name)
        universe, lcc = fixture.uc.universe, fixture.uc.lcc
        assert check_eta(universe, lcc, SMALL).passed
        assert check_adj(lcc, universe.p, SMALL[:2]).passed

    def test_i_p_functor(self, u3):
        lcc = u3.uc.lcc
        assert check_i_p_functor(lcc, u3.uc.p, SMALL).passed
        assert check_i_p_functor(lcc, u3.ju.p_e, SMALL).passed

    def test_i_omega_naturality_and_d_f(self, u3):
        ju, lcc = u3.ju, u3.uc.lcc
        naturality = check_i_hom_naturality(lcc, ju.omega, ju.p_e, ju.p, SMALL)
        assert naturality.check_id == "2015.04.10.l2"
        assert naturality.passed
        assert check_d_f_lemma(ju.e, ju.universe, lcc, ju.omega, SMALL).passed

    def test_d_p_functoriality(self, u3):
        assert check_d_p_functoriality(u3.uc.universe, SMALL, FinSet.skeletal(1)).passed
