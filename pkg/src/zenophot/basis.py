"""Basis enumeration for the conserved-excitation sector.

The simulated Hilbert space is a photon Fock space over waveguide modes
(two polarizations per waveguide) tensored with one multi-level absorber per
observed waveguide.  Every Hamiltonian term conserves the total excitation
charge (photon number plus absorber excitation), so a run lives entirely in
one charge sector.  This module enumerates that sector deterministically and
provides the state <-> index bijection everything else is built on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union


class Polarization(enum.Enum):
    """Circular polarization label of a photon mode."""

    R = "R"
    L = "L"


#: Mode ordering within one waveguide: R first, then L.
POLARIZATIONS = (Polarization.R, Polarization.L)

#: Excitation charge carried by each absorber level.
LEVEL_CHARGE = {"G": 0, "MR": 1, "ML": 1, "X": 1, "E": 2}


@dataclass(frozen=True)
class TwoLevel:
    """Two-level absorber: ground G and excited X, coupled to one polarization."""

    pol: Polarization = Polarization.R

    levels = ("G", "X")

    def transitions(self):
        """Absorbing transitions as (from_level, to_level, polarization)."""
        return (("G", "X", self.pol),)

    def level_energy(self, level: str, omega0: float, detuning: float) -> float:
        return {"G": 0.0, "X": omega0 + detuning}[level]


@dataclass(frozen=True)
class VType:
    """Three-level absorber: ground G with separate excited levels for R and L light."""

    levels = ("G", "MR", "ML")

    def transitions(self):
        return (
            ("G", "MR", Polarization.R),
            ("G", "ML", Polarization.L),
        )

    def level_energy(self, level: str, omega0: float, detuning: float) -> float:
        return {"G": 0.0, "MR": omega0 + detuning, "ML": omega0 + detuning}[level]


@dataclass(frozen=True)
class Diamond:
    """Four-level absorber whose ground-to-top transition absorbs one R and one L photon.

    The middle levels MR/ML sit off single-photon resonance by the detuning;
    the top level E is resonant with a photon pair.  A photon of one
    polarization drives G to the matching middle level, and the opposite
    polarization completes the climb to E.
    """

    levels = ("G", "MR", "ML", "E")

    def transitions(self):
        return (
            ("G", "MR", Polarization.R),
            ("ML", "E", Polarization.R),
            ("G", "ML", Polarization.L),
            ("MR", "E", Polarization.L),
        )

    def level_energy(self, level: str, omega0: float, detuning: float) -> float:
        return {
            "G": 0.0,
            "MR": omega0 + detuning,
            "ML": omega0 + detuning,
            "E": 2.0 * omega0,
        }[level]


AbsorberKind = Union[TwoLevel, VType, Diamond]


def level_charge(level: str) -> int:
    return LEVEL_CHARGE[level]


@dataclass(frozen=True)
class BasisState:
    """One basis vector: photon occupations per mode plus one level per absorber site.

    ``occupations`` is ordered waveguide-major with R before L, so entry
    ``2*w`` is the R count in waveguide ``w`` and ``2*w + 1`` the L count.
    ``levels`` follows the absorber sites in ascending waveguide order.
    """

    occupations: tuple[int, ...]
    levels: tuple[str, ...]

    def photon_count(self) -> int:
        return sum(self.occupations)

    def charge(self) -> int:
        return self.photon_count() + sum(LEVEL_CHARGE[lv] for lv in self.levels)

    def waveguide_photons(self, w: int) -> int:
        return self.occupations[2 * w] + self.occupations[2 * w + 1]

    def label(self) -> str:
        """Canonical rendering, e.g. ``R.L|G.G`` or ``RL.0|G.G`` for a bunched pair."""
        tokens = []
        for w in range(len(self.occupations) // 2):
            tok = "R" * self.occupations[2 * w] + "L" * self.occupations[2 * w + 1]
            tokens.append(tok or "0")
        photons = ".".join(tokens)
        if not self.levels:
            return photons
        return photons + "|" + ".".join(self.levels)

    def __str__(self) -> str:
        return self.label()


class HilbertSpace:
    """Ordered basis of one excitation-charge sector.

    Immutable after construction; the ordering is the deterministic
    lexicographic order produced by :func:`enumerate_sector`.
    """

    def __init__(self, spec, charge: int, states: tuple[BasisState, ...]):
        self.spec = spec
        self.charge = charge
        self.states = states
        self.index = {s: k for k, s in enumerate(states)}
        self.labels = tuple(s.label() for s in states)
        self._label_index = {lab: k for k, lab in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[BasisState]:
        return iter(self.states)

    def index_of(self, state: BasisState) -> int:
        """Position of ``state`` in the enumeration; KeyError if it is not in the sector."""
        if state.charge() != self.charge:
            raise KeyError(
                f"state {state} has charge {state.charge()}, sector has charge {self.charge}"
            )
        try:
            return self.index[state]
        except KeyError:
            raise KeyError(f"state {state} not in enumerated sector") from None

    def index_of_label(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"no basis state labelled {label!r}") from None


def _max_charge(n_modes: int, cap: int, site_kinds) -> int:
    return n_modes * cap + sum(max(LEVEL_CHARGE[lv] for lv in k.levels) for _, k in site_kinds)


def enumerate_sector(spec, charge: int) -> HilbertSpace:
    """Enumerate all basis states of the given excitation charge.

    The order is lexicographic over (occupations, level indices) with
    waveguides ascending, R before L, absorber sites ascending and levels in
    their declared order, so repeated enumeration is byte-for-byte stable.

    Raises ValueError for a negative charge or one that no state can carry
    under the per-mode photon cap.
    """
    if charge < 0:
        raise ValueError(f"excitation charge must be non-negative, got {charge}")
    sites = spec.absorber_sites
    cap = spec.photon_cap if spec.photon_cap is not None else charge
    n_modes = 2 * spec.n_waveguides
    if charge > _max_charge(n_modes, cap, sites):
        raise ValueError(
            f"charge {charge} exceeds the maximum the capped space can hold"
        )

    kinds = [k for _, k in sites]
    states: list[BasisState] = []
    occ = [0] * n_modes
    lev = [""] * len(kinds)

    def fill_levels(si: int, remaining: int):
        if si == len(kinds):
            if remaining == 0:
                states.append(BasisState(tuple(occ), tuple(lev)))
            return
        for name in kinds[si].levels:
            q = LEVEL_CHARGE[name]
            if q <= remaining:
                lev[si] = name
                fill_levels(si + 1, remaining - q)

    def fill_modes(mi: int, remaining: int):
        if mi == n_modes:
            fill_levels(0, remaining)
            return
        for n in range(min(cap, remaining) + 1):
            occ[mi] = n
            fill_modes(mi + 1, remaining - n)
        occ[mi] = 0

    fill_modes(0, charge)
    return HilbertSpace(spec, charge, tuple(states))


def index_of(space: HilbertSpace, state: BasisState) -> int:
    """Module-level alias for :meth:`HilbertSpace.index_of`."""
    return space.index_of(state)
