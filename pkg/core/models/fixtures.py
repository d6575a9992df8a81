"""
Finite-set fixtures: coded-family universes, their extensional J-structure, skewed
choosers and the named fixtures FIX-U3, FIX-U1 and FIX-incl.

A coded family is a list of codes with fiber sizes. U is the set of codes, Ũ the set
of pairs (code, i) with i < fiber size, and p the first projection.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field, ValidationError, field_validator

from config.settings import MAX_SET_SIZE
from core.category.fincat import FinSet, Mor
from core.category.lcc import FinSetLCC
from core.exceptions import FixtureError
from core.universe.functors import JFunctorData, UnivCatFunctor
from core.universe.juniv import JUniverse, UnivJBundle
from core.universe.universe import SkewedChooser, UniverseCategory, UniverseStructure


class CodeSpec(BaseModel):
    name: str = Field(..., min_length=1, description="Code name, an element of U")
    fiber: int = Field(..., ge=0, description="Size of the fiber of p over the code")


class CodedFamilySpec(BaseModel):
    """
    A coded family of finite sets.

    Features:
    - Ordered codes with fiber sizes, at least one code, unique names
    - Optional skew seed for the chooser (0 keeps the normalized squares)
    - Materialization cap passed on to the LCC structure
    """

    name: str = Field("U", description="Fixture name")
    codes: List[CodeSpec] = Field(..., min_length=1, description="Codes with fiber sizes")
    skew: int = Field(0, ge=0, description="Seed of the skewed chooser, 0 for none")
    max_set_size: int = Field(MAX_SET_SIZE, ge=1, description="Materialization cap per set")

    @field_validator("codes")
    @classmethod
    def unique_names(cls, codes: List[CodeSpec]) -> List[CodeSpec]:
        names = [code.name for code in codes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate code names in {names}")
        return codes

    @classmethod
    def parse(cls, data: Dict) -> "CodedFamilySpec":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise FixtureError(f"invalid coded family: {e}") from e

    @classmethod
    def of(cls, name: str, fibers: Dict[str, int], skew: int = 0) -> "CodedFamilySpec":
        return cls.parse({"name": name, "codes": [{"name": c, "fiber": n} for c, n in fibers.items()], "skew": skew})

    @property
    def fibers(self) -> Dict[str, int]:
        return {code.name: code.fiber for code in self.codes}

    def extensional_codes(self) -> Tuple[str, Optional[str]]:
        """
        The size-1 code carrying the diagonal and the size-0 code carrying everything else.

        Raises:
            FixtureError: if the size-1 code is missing, or the size-0 code is missing
                while some fiber has two or more elements
        """
        ones = [code.name for code in self.codes if code.fiber == 1]
        zeros = [code.name for code in self.codes if code.fiber == 0]
        if not ones:
            raise FixtureError(f"{self.name}: the extensional Eq needs a code with a one-element fiber")
        if not zeros and any(code.fiber >= 2 for code in self.codes):
            raise FixtureError(f"{self.name}: the extensional Eq needs a code with an empty fiber")
        return ones[0], (zeros[0] if zeros else None)


def coded_universe(spec: CodedFamilySpec) -> UniverseCategory:
    """The universe category (FinSet, p: Ũ → U, pt) of a coded family."""
    base = FinSet.materialize((code.name for code in spec.codes), f"{spec.name}.U", spec.max_set_size)
    total = FinSet.materialize(
        ((code.name, i) for code in spec.codes for i in range(code.fiber)), f"{spec.name}.Ũ", spec.max_set_size
    )
    p = Mor.from_function(total, base, lambda x: x[0])
    universe = UniverseStructure(p, name=f"p[{spec.name}]")
    uc = UniverseCategory(spec.name, universe, FinSetLCC(spec.max_set_size))
    if spec.skew:
        uc = skew_structure(uc, spec.skew)
    logger.debug(f"coded universe {spec.name}: |U| = {len(base)}, |Ũ| = {len(total)}, chooser {uc.universe.chooser.name}")
    return uc


def skew_structure(uc: UniverseCategory, seed: int) -> UniverseCategory:
    """The same p with every chosen apex permuted by a seeded permutation; seed 0 is the identity."""
    return uc.with_chooser(SkewedChooser(seed))


def _fiber_sizes(uc: UniverseCategory) -> Dict[str, int]:
    return {code: len(uc.p.fiber(code)) for code in uc.base.elements}


def extensional_eq(uc: UniverseCategory) -> Mor:
    """Eq(x, y) is the size-1 code on the diagonal of (Ũ;p) and the size-0 code off it."""
    spec = CodedFamilySpec.of(uc.name, _fiber_sizes(uc))
    one, zero = spec.extensional_codes()
    square = uc.universe.ext(uc.p)
    return Mor.from_function(square.apex, uc.base, lambda w: one if square.proj(w) == square.q(w) else zero)


def extensional_j(uc: UniverseCategory) -> Tuple[JUniverse, UnivJBundle]:
    """
    The extensional J-structure: Eq as above, Ω constant at the point of the size-1
    fiber, Jp from the unique filler (Id×ω)⁻¹∘top.

    Raises:
        FixtureError: if the codes required by the extensional Eq are missing
    """
    one, _ = CodedFamilySpec.of(uc.name, _fiber_sizes(uc)).extensional_codes()
    Eq = extensional_eq(uc)
    Omega = Mor.constant(uc.total, uc.total, (one, 0))
    ju = JUniverse(uc, Eq, Omega)
    Jp = ju.filler_to_j(ju.extensional_filler())
    logger.debug(f"extensional J on {uc.name}: |EŨ| = {len(ju.e.total)}, |Fp| = {len(ju.fp.apex)}")
    return ju, ju.bundle(Jp)


@dataclass
class Fixture:
    """A universe category with its extensional J-structure."""

    name: str
    uc: UniverseCategory
    ju: JUniverse
    bundle: UnivJBundle


def build_fixture(spec: CodedFamilySpec) -> Fixture:
    uc = coded_universe(spec)
    ju, bundle = extensional_j(uc)
    return Fixture(spec.name, uc, ju, bundle)


@dataclass
class FunctorFixture:
    """A code-map functor (Id, φ, φ̃) between two fixtures, with its J-data."""

    name: str
    source: Fixture
    target: Fixture
    functor: UnivCatFunctor
    data: JFunctorData


def code_map_functor(name: str, source: Fixture, target: Fixture, code_map: Dict[str, str]) -> FunctorFixture:
    """
    Identity Φ with φ = the code map and φ̃(c, i) = (φ(c), i).

    Raises:
        FixtureError: if the code map is not total or a target fiber is too small for φ̃
    """
    missing = [c for c in source.uc.base.elements if c not in code_map]
    if missing:
        raise FixtureError(f"functor {name}: codes {missing} are not mapped")
    unknown = [c for c in code_map.values() if c not in target.uc.base]
    if unknown:
        raise FixtureError(f"functor {name}: codes {unknown} are not codes of {target.name}")
    phi = Mor.from_mapping(source.uc.base, target.uc.base, code_map)
    moved = [(code_map[c], i) for c, i in source.uc.total.elements]
    if any(x not in target.uc.total for x in moved):
        raise FixtureError(f"functor {name}: a fiber of {target.name} is smaller than its preimage fiber")
    phi_tilde = Mor.from_function(source.uc.total, target.uc.total, lambda x: (code_map[x[0]], x[1]))
    functor = UnivCatFunctor.between(source.uc, target.uc, phi, phi_tilde, name=name)
    data = JFunctorData(functor, source.ju, target.ju, source.bundle.Jp, target.bundle.Jp)
    return FunctorFixture(name, source, target, functor, data)


def identity_functor(fixture: Fixture) -> FunctorFixture:
    return code_map_functor("id", fixture, fixture, {c: c for c in fixture.uc.base.elements})


FIX_U3 = {"0": 0, "1": 1, "2": 2}
FIX_U1 = {"1a": 1, "1b": 1}
FIX_INCL_SMALL = {"0": 0, "1": 1}


def fix_u3(skew: int = 0) -> Fixture:
    return build_fixture(CodedFamilySpec.of("FIX-U3", FIX_U3, skew))


def fix_u1(skew: int = 0) -> Fixture:
    return build_fixture(CodedFamilySpec.of("FIX-U1", FIX_U1, skew))


def fix_incl(skew: int = 0) -> FunctorFixture:
    """The code inclusion {0, 1} ↪ {0, 1, 2} over identity Φ."""
    small = build_fixture(CodedFamilySpec.of("FIX-incl-small", FIX_INCL_SMALL, skew))
    return code_map_functor("incl", small, fix_u3(skew), {"0": "0", "1": "1"})
