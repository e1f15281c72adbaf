import numpy as np
import pytest

from nlsground import GridFunction, make_grid


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_profiles(grid, count, seed=0, widths=(0.8, 2.0), amps=(0.5, 2.0)):
    """Smooth random bump profiles vanishing at the boundary."""
    gen = np.random.default_rng(seed)
    out = []
    r = grid.nodes
    for _ in range(count):
        sigma = gen.uniform(*widths)
        amp = gen.uniform(*amps)
        bumps = amp * np.exp(-((r / sigma) ** 2))
        k = gen.integers(0, 3)
        if k:
            bumps = bumps * (1.0 + 0.3 * np.cos(k * np.pi * r / (4.0 * sigma))
                             * np.exp(-((r / (2.0 * sigma)) ** 2)))
        bumps[-1] = 0.0
        out.append(GridFunction(grid, bumps))
    return out
