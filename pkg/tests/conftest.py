import sys
import pathlib

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from parasuper.groups import Parabolic, build_spec  # noqa: E402

_WORLDS = {}


def world_for(family, n, q, blocks):
    key = (family, n, q, tuple(blocks))
    if key not in _WORLDS:
        _WORLDS[key] = Parabolic(build_spec(family, n, q, blocks))
    return _WORLDS[key]


@pytest.fixture(scope="session")
def borel_d2():
    return world_for("D", 2, 3, (1, 1, 0, 1, 1))


@pytest.fixture(scope="session")
def borel_c2():
    return world_for("C", 2, 3, (1, 1, 0, 1, 1))


@pytest.fixture(scope="session")
def borel_b2():
    return world_for("B", 2, 3, (1, 1, 1, 1, 1))


@pytest.fixture(scope="session")
def twoblock_c2():
    return world_for("C", 2, 3, (2, 0, 2))
