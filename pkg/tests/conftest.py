import numpy as np
import pytest

from rkdtw.dtw import _accumulated_matrix, _accumulated_sq


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Compile (or load from cache) the jitted kernels once, so timed tests
    # measure steady-state throughput rather than compilation.
    q = np.zeros(4)
    c = np.ones(4)
    mask = np.ones((4, 4), dtype=bool)
    _accumulated_sq(q, c, mask)
    _accumulated_matrix(q, c, mask)
