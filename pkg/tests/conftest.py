import pytest

from torusmaps import sampler

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def enum():
    """Exhaustive enumeration with closures for n <= 3."""
    return {n: sampler.enumerate_all(n) for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def sampled():
    """A handful of closed sampled maps of moderate size."""
    law = sampler.parameter_law(60)
    return [sampler.sample_triangulation(60, 11, i, law=law) for i in range(8)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
