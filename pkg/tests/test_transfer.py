import pytest

from core.category.fincat import Mor
from core.csystem.csystem import CSystemHomomorphism
from core.csystem.jcs import (
    JdomEntry,
    check_extensional,
    check_hom_j,
    check_iota,
    check_j,
    idx_t,
    is_jdom_entry,
    jdom_enum,
    rf,
)
from core.csystem.transfer import (
    check_extensional_eq_unique,
    check_j_defining_equation,
    check_transfer,
    expected_extensional_count,
    extensional_eqs,
    idt_from_eq,
    j_from_jp,
    refl_from_omega,
    solutions_by_search,
)
from core.exceptions import JStructureError

TRANSFER_IDS = [
    "2015.03.27.def1",
    "2015.03.27.eq8",
    "2015.03.27.def2",
    "2015.03.27.l1",
    "2015.04.02.l3",
    "2015.03.31.l2",
    "2015.04.04.l4",
    "2015.04.04.constr1",
    "2015.04.04.l5",
    "2015.04.04.l1",
    "2015.05.08.rem1",
]


def tweakable(cc, entries):
    """An entry together with a section of P other than J(entry)."""
    for entry in entries:
        others = list(cc.sections(entry.P))
        if len(others) >= 2:
            return entry, others
    raise AssertionError("no entry with two sections of P")


class TestStructures:
    def test_eq_shape_is_checked(self, cc3):
        with pytest.raises(JStructureError):
            idt_from_eq(cc3, Mor.identity(cc3.universe.base))

    def test_omega_square_is_checked(self, cc3, u3):
        with pytest.raises(JStructureError):
            refl_from_omega(cc3, u3.ju.Eq, Mor.identity(cc3.universe.total))

    def test_jp_must_be_a_section(self, cc3, u3, bundle3):
        fp = u3.ju.fp
        first = fp.apex.elements[0]
        x = next(x for x in fp.i_pe_utilde.obj.elements if fp.coJ(x) != first)
        wrong = Mor.constant(fp.apex, fp.i_pe_utilde.obj, x)
        with pytest.raises(JStructureError):
            j_from_jp(cc3, u3.ju, wrong, bundle3.idt, bundle3.refl)

    def test_idt_needs_a_common_boundary(self, cc3, bundle3):
        a, b = cc3.objects_of_length(1)[1:3]
        with pytest.raises(JStructureError):
            bundle3.idt(cc3.pt(), next(cc3.sections(a)), next(cc3.sections(b)))

    def test_idx_t_lies_two_steps_over_t(self, cc3, bundle3):
        for T in cc3.objects_of_length(1):
            X = idx_t(cc3, bundle3.idt, T)
            assert X.length == 3
            assert cc3.ft_n(X, 2) == T
            r = rf(cc3, bundle3.idt, bundle3.refl, T)
            assert (r.dom, r.cod) == (T, X)


class TestJdom:
    def test_entries_are_in_jdom(self, cc3, bundle3):
        entries = jdom_enum(cc3, bundle3.idt, bundle3.refl, 1)
        assert entries
        assert all(is_jdom_entry(cc3, bundle3.idt, bundle3.refl, e) for e in entries)

    def test_wrong_boundary_is_not_in_jdom(self, cc3, bundle3):
        entry = jdom_enum(cc3, bundle3.idt, bundle3.refl, 1)[-1]
        bad = JdomEntry(entry.gamma, entry.T, entry.P, next(cc3.sections(entry.T)))
        assert not is_jdom_entry(cc3, bundle3.idt, bundle3.refl, bad)
        with pytest.raises(JStructureError):
            bundle3.j(bad)

    def test_j_is_the_unique_solution(self, cc3, u3, bundle3):
        for entry in jdom_enum(cc3, bundle3.idt, bundle3.refl, 1):
            assert solutions_by_search(cc3, u3.ju, u3.bundle.Jp, entry) == [bundle3.j(entry)]


class TestTransfer:
    @pytest.mark.parametrize("names", [("cc3", "u3", "bundle3"), ("cc3_skewed", "u3_skewed", "bundle3_skewed"),
                                       ("cc1", "u1", "bundle1")])
    def test_all_checks_pass(self, names, request):
        cc, fixture, bundle = (request.getfixturevalue(n) for n in names)
        results = check_transfer(cc, fixture.ju, bundle, 1, Jp=fixture.bundle.Jp)
        assert [r.check_id for r in results] == TRANSFER_IDS
        failed = [(r.check_id, r.counterexamples[:1]) for r in results if r.failed]
        assert failed == []

    def test_without_jp_only_lemmas_run(self, cc3, u3, bundle3):
        results = check_transfer(cc3, u3.ju, bundle3, 1)
        assert [r.check_id for r in results] == TRANSFER_IDS[:7]

    def test_generic_j_checks(self, cc3, bundle3):
        results = check_j(cc3, bundle3, 1)
        assert [r.check_id for r in results] == [
            "2015.03.27.def1", "2015.03.27.eq8", "2015.03.27.def2", "2015.03.27.def3", "2015.03.27.def3"]
        assert all(r.passed for r in results)

    def test_tweaked_j_breaks_the_iota_rule(self, cc3, u3, bundle3):
        entries = jdom_enum(cc3, bundle3.idt, bundle3.refl, 1)
        entry, sections = tweakable(cc3, entries)
        other = next(s for s in sections if s != bundle3.j(entry))
        tweaked = bundle3.with_j(bundle3.j.with_override(entry, other))
        assert check_iota(cc3, tweaked, entries).failed
        assert check_j_defining_equation(cc3, u3.ju, tweaked, u3.bundle.Jp, entries).failed

    @pytest.mark.slow
    def test_all_checks_pass_at_bound_two(self, cc3, u3, bundle3):
        results = check_transfer(cc3, u3.ju, bundle3, 2, Jp=u3.bundle.Jp)
        assert all(r.passed for r in results)


class TestExtensional:
    @pytest.mark.parametrize("name", ["cc3", "cc3_skewed"])
    def test_extensional_idt(self, name, request):
        cc = request.getfixturevalue(name)
        bundle = request.getfixturevalue("bundle3" if name == "cc3" else "bundle3_skewed")
        result = check_extensional(cc, bundle.idt, 2)
        assert result.check_id == "2015.05.12.rem1"
        assert result.passed

    def test_non_extensional_eq(self, cc3, u3):
        constant = Mor.constant(u3.ju.Eq.dom, cc3.universe.base, "1")
        assert check_extensional(cc3, idt_from_eq(cc3, constant), 1).failed

    def test_counts(self, u3, u1):
        assert expected_extensional_count(u3.uc) == 1
        assert expected_extensional_count(u1.uc) == 4
        assert extensional_eqs(u3.uc) == [u3.ju.Eq]
        assert len(extensional_eqs(u1.uc)) == 4

    @pytest.mark.parametrize("name", ["u3", "u1"])
    def test_uniqueness_check(self, name, request):
        fixture = request.getfixturevalue(name)
        result = check_extensional_eq_unique(fixture.uc, 1, fixture.ju.Eq)
        assert result.check_id == "2015.05.12.rem1.eq"
        assert result.passed


class TestHomomorphisms:
    def test_identity_preserves_the_j_structure(self, cc3, bundle3):
        results = check_hom_j(CSystemHomomorphism.identity(cc3), bundle3, bundle3, 1)
        assert [r.check_id for r in results] == ["2015.04.06.def1", "2015.04.06.def2", "2015.04.06.l3"]
        assert all(r.passed for r in results)
