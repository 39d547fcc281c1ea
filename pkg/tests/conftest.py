import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from essig.tensor import RATIONAL, TruncatedTensor

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@st.composite
def rational_tensors(draw, d=2, N=3, unit_level0=False):
    levels = []
    for k in range(N + 1):
        if k == 0 and unit_level0:
            levels.append([Fraction(1)])
        else:
            levels.append(draw(st.lists(small_fractions, min_size=d**k, max_size=d**k)))
    return TruncatedTensor(d, N, levels, RATIONAL)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
