from __future__ import annotations

import numpy as np
import pytest

from luqpi.groups import gen_group
from luqpi.rydberg import generate_dataset


@pytest.fixture(scope="session")
def group2():
    return gen_group(2)


@pytest.fixture(scope="session")
def group3():
    return gen_group(3)


@pytest.fixture(scope="session")
def group4():
    return gen_group(4)


@pytest.fixture(scope="session")
def phase_dataset_small():
    """Six-atom phase diagram on a coarse grid; all three phases present."""
    deltas = np.round(np.linspace(-2.0, 4.0, 25), 10)
    radii = np.round(np.linspace(1.0, 3.0, 15), 10)
    points = [(float(d), float(r)) for d in deltas for r in radii]
    return generate_dataset(points, 6)
