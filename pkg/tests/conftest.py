import os
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cycloc.cyclic import code_from_zeros, coset_representatives

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SPECS = Path(__file__).resolve().parent.parent / "specs"


def all_cyclic_codes(n, k_max=12, k_min=1):
    """Every binary cyclic code of length n with k_min <= k <= k_max."""
    reps = [r[0] for r in coset_representatives(n, range(n))]
    out = []
    for size in range(len(reps) + 1):
        for combo in combinations(reps, size):
            code = code_from_zeros(n, combo)
            if k_min <= code.k <= k_max:
                out.append(code)
    return out


@pytest.fixture(scope="session")
def hamming7():
    return code_from_zeros(7, [1])


@pytest.fixture(scope="session")
def bch63_51():
    return code_from_zeros(63, [1, 3])


@pytest.fixture(scope="session")
def c63_48():
    return code_from_zeros(63, [1, 3, 27])


@pytest.fixture(scope="session")
def c63_45():
    return code_from_zeros(63, [1, 3, 7])


@pytest.fixture(scope="session")
def c63_36():
    return code_from_zeros(63, [0, 1, 3, 5, 7, 21])


@pytest.fixture(scope="session")
def c63_33():
    return code_from_zeros(63, [0, 1, 3, 5, 7, 21, 27])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
