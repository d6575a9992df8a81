"""
Shared fixtures: the named coded-family universes, their C-systems and transferred bundles.

Everything is session scoped; the structures memoize their chosen squares, so building
them once keeps the suite fast.
"""
import json
from pathlib import Path

import pytest
from loguru import logger

from core.csystem.cc_univ import UniverseCSystem
from core.csystem.transfer import transfer_bundle
from core.models.fixtures import fix_incl, fix_u1, fix_u3

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    logger.remove()
    logger.add(lambda message: None, level="WARNING")
    yield


@pytest.fixture(scope="session")
def u3():
    return fix_u3()


@pytest.fixture(scope="session")
def u3_skewed():
    return fix_u3(7)


@pytest.fixture(scope="session")
def u1():
    return fix_u1()


@pytest.fixture(scope="session")
def incl():
    return fix_incl()


@pytest.fixture(scope="session")
def cc3(u3):
    return UniverseCSystem(u3.uc.universe, name="CC(FIX-U3)")


@pytest.fixture(scope="session")
def cc3_skewed(u3_skewed):
    return UniverseCSystem(u3_skewed.uc.universe, name="CC(FIX-U3/skewed)")


@pytest.fixture(scope="session")
def cc1(u1):
    return UniverseCSystem(u1.uc.universe, name="CC(FIX-U1)")


@pytest.fixture(scope="session")
def bundle3(cc3, u3):
    return transfer_bundle(cc3, u3.ju, u3.bundle.Jp)


@pytest.fixture(scope="session")
def bundle3_skewed(cc3_skewed, u3_skewed):
    return transfer_bundle(cc3_skewed, u3_skewed.ju, u3_skewed.bundle.Jp)


@pytest.fixture(scope="session")
def bundle1(cc1, u1):
    return transfer_bundle(cc1, u1.ju, u1.bundle.Jp)


@pytest.fixture
def fixture_path():
    def resolve(name: str) -> str:
        return str(FIXTURE_DIR / name)

    return resolve


@pytest.fixture
def fixture_data():
    def load(name: str) -> dict:
        with open(FIXTURE_DIR / name) as f:
            return json.load(f)

    return load
