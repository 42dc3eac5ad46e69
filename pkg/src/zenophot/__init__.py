"""Quantum dynamics simulator for measurement-suppressed photon bunching.

Photons in two or three coupled waveguides are continuously observed by
multi-level absorbers; integrating the time-dependent Schrodinger equation
over the conserved-excitation sector turns unentangled inputs into
polarization Bell states and W states.  Closed-form perturbation-theory
rates provide an independent short-time oracle for the numerics.
"""

from ._backend import DEFAULT_BACKEND, available_backends
from .basis import (
    BasisState,
    Diamond,
    HilbertSpace,
    Polarization,
    TwoLevel,
    VType,
    enumerate_sector,
)
from .evolve import IntegratorConfig, NormDriftError, StateVector, TimeSeries, evolve
from .hamiltonian import (
    HamiltonianBlocks,
    RampSchedule,
    SystemSpec,
    build_blocks,
    envelope,
    hamiltonian_at,
)

__version__ = "0.1.0"

__all__ = [
    "BasisState",
    "DEFAULT_BACKEND",
    "Diamond",
    "HamiltonianBlocks",
    "HilbertSpace",
    "IntegratorConfig",
    "NormDriftError",
    "Polarization",
    "RampSchedule",
    "StateVector",
    "SystemSpec",
    "TimeSeries",
    "TwoLevel",
    "VType",
    "available_backends",
    "build_blocks",
    "enumerate_sector",
    "envelope",
    "evolve",
    "hamiltonian_at",
    "__version__",
]
