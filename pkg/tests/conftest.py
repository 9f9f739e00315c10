import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def fd_second(u, x, d=1e-4):
    return (u(x + d) - 2.0 * u(x) + u(x - d)) / d**2


def fd_first(u, x, d=1e-6):
    return (u(x + d) - u(x - d)) / (2.0 * d)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod and getattr(mod, "GATE_LINES", None):
        terminalreporter.section("acceptance gate")
        for line in sorted(mod.GATE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
