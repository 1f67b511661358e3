import numpy as np
import pytest
from hypothesis import strategies as st

from hidden_failure import FailureModel

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
open_probs = st.floats(min_value=1e-6, max_value=1 - 1e-6)


@st.composite
def failure_models(draw, max_hyp=4, max_states=3, theta=open_probs):
    """Random well-formed models with strictly positive prior cells."""
    H = draw(st.integers(2, max_hyp))
    S = draw(st.integers(1, max_states))
    weights = np.array(
        draw(st.lists(st.floats(0.01, 1.0), min_size=H * S, max_size=H * S))
    ).reshape(H, S)
    thetas = np.array(
        draw(st.lists(theta, min_size=H * S, max_size=H * S))
    ).reshape(H, S)
    return FailureModel(
        [f"h{i}" for i in range(H)],
        [f"s{f}" for f in range(S)],
        weights / weights.sum(),
        thetas,
    )


@st.composite
def evidence_pairs(draw, max_n=60):
    n = draw(st.integers(0, max_n))
    k = draw(st.integers(0, n))
    return n, k


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
