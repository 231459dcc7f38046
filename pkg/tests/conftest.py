import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from submodmax import build_cut, build_explicit_table  # noqa: E402

C4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0)]
A, B, C, D = 0, 1, 2, 3


@pytest.fixture
def c4():
    return build_cut(4, C4_EDGES)


@pytest.fixture
def zero4():
    return build_explicit_table(4, [0.0] * 16)
