import pytest

from gammadiff.gdd import GddParams

# parameter grid used throughout: Laplace, integer shape, generic, singular at 0, skewed
GRID = [(1, 1, 1, 1), (2, 1, 1, 1), (2, 1.5, 0.7, 2.2), (0.6, 1, 0.7, 2), (5, 2, 3, 0.5)]
GRID_IDS = ["laplace", "int-shape", "generic", "cusp", "skewed"]

VG_GRID = [(r, th, s) for r in (1.5, 2, 3, 5) for th in (-1, 0, 0.5) for s in (0.5, 1, 2)]


def rel_err(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture(params=GRID, ids=GRID_IDS)
def gparams(request):
    return GddParams(*request.param)


# PASS/FAIL lines from the acceptance suite, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
