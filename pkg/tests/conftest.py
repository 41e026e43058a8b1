import sys

import pytest

from iotagg import montecarlo


@pytest.fixture
def fresh_mc_cache():
    """Drop cached distance draws so a test really re-simulates."""
    montecarlo._cached_distances.cache_clear()
    yield
    montecarlo._cached_distances.cache_clear()


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
