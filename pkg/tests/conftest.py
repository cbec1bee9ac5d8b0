import numpy as np
import pytest

from paradiag_rom.discretization import PDEProblem, SpaceGrid, TimeGrid


def zero(*args):
    return np.zeros_like(args[0], dtype=float)


def const(v):
    return lambda *args: np.full_like(args[0], v, dtype=float)


def diffusion_problem(dim=1, eps=1.0, p=0.0, q=0.0, T=1.0, **kw):
    """Constant-coefficient problem with homogeneous data unless overridden."""
    base = dict(dim=dim, a=const(eps), p=const(p), f=zero, g=zero, u0=zero, T=T,
                q=const(q) if dim == 2 else None)
    base.update(kw)
    return PDEProblem(**base)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
