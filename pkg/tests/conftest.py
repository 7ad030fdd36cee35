import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cstarmod import AlgebraShape

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SHAPES = [(1,), (2,), (1, 1), (3,), (2, 3), (1, 2)]

shapes = st.sampled_from(SHAPES).map(AlgebraShape)
abelian_shapes = st.sampled_from([(1,), (1, 1), (1, 1, 1)]).map(AlgebraShape)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def block_diag_matrix(a):
    """Dense block-diagonal matrix of an algebra element (test oracle)."""
    from scipy.linalg import block_diag

    return block_diag(*a.blocks)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
