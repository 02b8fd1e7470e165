import pytest

from mirrorspec import MirrorParams, QuadratureConfig


@pytest.fixture
def tight():
    """Kernel tolerances near the round-off floor."""
    return QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)


@pytest.fixture
def fig1_params():
    return MirrorParams(1.0, 1e6)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
