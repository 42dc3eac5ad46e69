import numpy as np
import pytest

from zenophot.basis import Diamond, enumerate_sector
from zenophot.hamiltonian import RampSchedule, SystemSpec, build_blocks


@pytest.fixture(scope="session")
def bell_spec():
    return SystemSpec(n_waveguides=2, absorbers={0: Diamond(), 1: Diamond()},
                      ramp=RampSchedule.from_plateau(6759.8))


@pytest.fixture(scope="session")
def bell_space(bell_spec):
    return enumerate_sector(bell_spec, 2)


@pytest.fixture(scope="session")
def bell_blocks(bell_spec, bell_space):
    return build_blocks(bell_spec, bell_space)


def state_with(space, label):
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.index_of_label(label)] = 1.0
    return psi
