import pytest

from degen_kpp import DEFAULT_TOL, classify, reconstruct, solve_large, solve_small, threshold_table

C = 2.1

# acceptance results, filled by test_acceptance.py and printed at the end of the run
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def table():
    return threshold_table(C, DEFAULT_TOL)


@pytest.fixture(scope="session")
def small_trace():
    return solve_small(C, DEFAULT_TOL)


@pytest.fixture(scope="session")
def large_trace():
    return solve_large(C, DEFAULT_TOL)


@pytest.fixture(scope="session")
def small_profile(small_trace):
    return reconstruct(small_trace, DEFAULT_TOL)


@pytest.fixture(scope="session")
def large_profile(large_trace):
    return reconstruct(large_trace, DEFAULT_TOL)


@pytest.fixture(scope="session")
def type_alphas(table):
    """One shooting value per class at c = 2.1."""
    return {
        "NonSaturated": table.h0_half,
        "SaturatedA": 0.5 * (table.h0_half + table.bell_top),
        "SaturatedB": table.bell_top,
        "SaturatedC": (table.bell_top * table.alpha_max) ** 0.5,
    }


@pytest.fixture(scope="session")
def records(table, type_alphas):
    return {k: classify(C, a, table, DEFAULT_TOL) for k, a in type_alphas.items()}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
