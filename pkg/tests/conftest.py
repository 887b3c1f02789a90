import pytest

from mcwd.schedules import generate_example1

# Empirical starting index for Example 1 (s1 = 10, c = 2): frozen from
# scan_example1_start, re-derived in the acceptance suite.
EX1_N2 = 47
EX1_NSTAR = EX1_N2 * EX1_N2


@pytest.fixture(scope="session")
def ex1_params():
    return generate_example1(10, 2, n_max=EX1_NSTAR + 12, N2=EX1_N2)


@pytest.fixture(scope="session")
def ex1_cache():
    return {}
