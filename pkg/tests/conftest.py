import numpy as np
import pytest

from gfront.grid import ScalarField2D, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def field_from(n, fn, shift=2 * np.pi):
    """Periodic part built from fn(x[:, None], y[None, :])."""
    g = make_grid(n, n)
    x, y = g.x_nodes()[:, None], g.y_nodes()[None, :]
    return ScalarField2D(g, np.broadcast_to(fn(x, y), g.shape).copy(), shift)


# one PASS/FAIL line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
