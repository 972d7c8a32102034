import numpy as np
import pytest

from chirped_passage import (
    PulseParams, basis_state, default_window, dressed_frame, four_level, propagate,
    rb85_d1_preset,
)

ADIABATIC = PulseParams(peak_rabi=3.035, fwhm=2.995, chirp_rate=-2.947)
NONADIABATIC = PulseParams(peak_rabi=3.035, fwhm=2.995, chirp_rate=-0.092)

# Lines printed by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


class Run:
    """One propagated reference run with its dressed frame, built lazily."""

    def __init__(self, pulse):
        self.pulse = pulse
        self.atom = rb85_d1_preset()
        self.hamiltonian = four_level(pulse, self.atom)
        self.settings = default_window(pulse)
        self.traj = propagate(self.hamiltonian, basis_state(4), self.settings)
        self._frame = None

    @property
    def frame(self):
        if self._frame is None:
            self._frame = dressed_frame(self.hamiltonian, self.traj.times)
        return self._frame


@pytest.fixture(scope="session")
def atom():
    return rb85_d1_preset()


@pytest.fixture(scope="session")
def run1():
    return Run(ADIABATIC)


@pytest.fixture(scope="session")
def run2():
    return Run(NONADIABATIC)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
