import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nmrdiscord.channels import ChannelSelection, RelaxationParams  # noqa: E402
from nmrdiscord.dynamics import evolve_trajectory  # noqa: E402
from nmrdiscord.nmr import J_CHLOROFORM, inject_residual_coherence, sampling_grid  # noqa: E402
from nmrdiscord.states import BellDiagonalCoeffs, bell_diagonal_deviation  # noqa: E402

# synthetic initial correlations; the experimental ones are unpublished
SUDDEN = BellDiagonalCoeffs(0.41, 0.41, 0.30)
CONSTANT = BellDiagonalCoeffs(0.3, 0.3, 0.9)

PD = ChannelSelection.PHASE_DAMPING
BOTH = ChannelSelection.BOTH


@pytest.fixture(scope="session")
def params():
    return RelaxationParams()


@pytest.fixture(scope="session")
def grid():
    return sampling_grid(J_CHLOROFORM, 250)


def _run(c, params, grid, sel, amplitude=0.0):
    delta = inject_residual_coherence(bell_diagonal_deviation(c), amplitude)
    return evolve_trajectory(delta, params, grid, sel, j_coupling=J_CHLOROFORM)


@pytest.fixture(scope="session")
def traj_constant_pd(params, grid):
    return _run(CONSTANT, params, grid, PD)


@pytest.fixture(scope="session")
def traj_constant_both(params, grid):
    return _run(CONSTANT, params, grid, BOTH)


@pytest.fixture(scope="session")
def traj_sudden_pd(params, grid):
    return _run(SUDDEN, params, grid, PD)


@pytest.fixture(scope="session")
def traj_sudden_both(params, grid):
    # X-type start: the coupling propagator is inert, so this doubles as the zero-amplitude control
    return _run(SUDDEN, params, grid, BOTH)


@pytest.fixture(scope="session")
def traj_residual(params, grid):
    return _run(SUDDEN, params, grid, BOTH, amplitude=0.02)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
