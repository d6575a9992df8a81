"""
The on-disk fixture document: codes, options and functor blocks, versioned by a format tag.
"""
import json
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import CSYSTEM_LENGTH_BOUND, FIXTURE_FORMAT, LIFTING_SET_BOUND, MAX_SET_SIZE
from core.exceptions import FixtureError
from core.models.fixtures import (
    CodeSpec,
    CodedFamilySpec,
    Fixture,
    FunctorFixture,
    build_fixture,
    code_map_functor,
)
from core.universe.lifting import CLASS_PAIRS, THEOREMS, TH1


class Bounds(BaseModel):
    model_config = ConfigDict(extra="forbid")

    csystem: int = Field(CSYSTEM_LENGTH_BOUND, ge=0, description="Length bound for C-system suites")
    lifting: int = Field(LIFTING_SET_BOUND, ge=0, description="Set-size bound for lifting enumerations")


class Options(BaseModel):
    model_config = ConfigDict(extra="forbid")

    skew: int = Field(0, ge=0, description="Skewed chooser seed, 0 for the normalized squares")
    bounds: Bounds = Field(default_factory=Bounds)
    class_pair: str = Field("iso-all", description="Morphism-class pair for the lifting suites")
    theorem: str = Field(TH1, description="Theorem used by derive-j")
    defect: Optional[str] = Field(None, description="Name of a defect to inject before verification")
    max_set_size: int = Field(MAX_SET_SIZE, ge=1)

    @field_validator("class_pair")
    @classmethod
    def known_pair(cls, value: str) -> str:
        if value not in CLASS_PAIRS:
            raise ValueError(f"unknown class pair {value!r}; expected one of {sorted(CLASS_PAIRS)}")
        return value

    @field_validator("theorem")
    @classmethod
    def known_theorem(cls, value: str) -> str:
        if value not in THEOREMS:
            raise ValueError(f"unknown theorem {value!r}; expected one of {list(THEOREMS)}")
        return value


class FunctorBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    source: str = Field(..., description="Name of the source universe")
    target: str = Field(..., description="Name of the target universe")
    code_map: Dict[str, str] = Field(..., description="φ on codes")


class FixtureDocument(BaseModel):
    """
    A fixture document.

    Features:
    - The primary coded family under ``name``/``codes``
    - Further named families under ``extra_universes`` for functor blocks
    - Options: skew seed, bounds, class pair, theorem, injected defect
    - Parse, validate and dump without loss
    """

    model_config = ConfigDict(extra="forbid")

    format: Literal["jcs-fixture/1"] = FIXTURE_FORMAT
    name: str = Field(..., min_length=1)
    codes: List[CodeSpec] = Field(..., min_length=1)
    extra_universes: Dict[str, List[CodeSpec]] = Field(default_factory=dict)
    options: Options = Field(default_factory=Options)
    functors: List[FunctorBlock] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_references(self) -> "FixtureDocument":
        names = self.universe_names()
        if self.name in self.extra_universes:
            raise ValueError(f"extra universe {self.name!r} shadows the primary universe")
        for name, family in zip(names, [self.codes, *self.extra_universes.values()]):
            codes = [code.name for code in family]
            if len(set(codes)) != len(codes):
                raise ValueError(f"duplicate code names in universe {name!r}")
            if not codes:
                raise ValueError(f"universe {name!r} has no codes")
        for block in self.functors:
            for end in (block.source, block.target):
                if end not in names:
                    raise ValueError(f"functor {block.name!r} refers to unknown universe {end!r}")
        return self

    def universe_names(self) -> List[str]:
        return [self.name, *self.extra_universes]

    def spec(self, name: Optional[str] = None) -> CodedFamilySpec:
        name = name or self.name
        codes = self.codes if name == self.name else self.extra_universes.get(name)
        if codes is None:
            raise FixtureError(f"unknown universe {name!r}")
        return CodedFamilySpec(name=name, codes=codes, skew=self.options.skew, max_set_size=self.options.max_set_size)

    def dump(self) -> Dict:
        return self.model_dump(mode="json")


def parse_document(data: Dict, source: str = "<memory>") -> FixtureDocument:
    """
    Raises:
        FixtureError: with the location of the first invalid field
    """
    try:
        return FixtureDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<document>"
        raise FixtureError(f"{source}: {location}: {first['msg']}") from e


def load_document(path: str) -> FixtureDocument:
    """
    Raises:
        FileNotFoundError: if the file does not exist
        FixtureError: for malformed JSON (with line and column) or an invalid document
    """
    with open(path, "r") as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FixtureError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise FixtureError(f"{path}: a fixture document is a JSON object")
    document = parse_document(data, path)
    logger.info(f"Loaded fixture {document.name} from {path}")
    return document


@dataclass
class FixtureContext:
    """The fixtures and functors a document describes, built on demand."""

    document: FixtureDocument
    _fixtures: Dict[str, Fixture] = field(default_factory=dict)
    _functors: Dict[str, FunctorFixture] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.document.name

    @property
    def primary(self) -> Fixture:
        return self.fixture(self.document.name)

    def fixture(self, name: str) -> Fixture:
        if name not in self._fixtures:
            self._fixtures[name] = build_fixture(self.document.spec(name))
        return self._fixtures[name]

    def functors(self) -> List[FunctorFixture]:
        for block in self.document.functors:
            if block.name not in self._functors:
                self._functors[block.name] = code_map_functor(
                    block.name, self.fixture(block.source), self.fixture(block.target), block.code_map
                )
        return [self._functors[block.name] for block in self.document.functors]
