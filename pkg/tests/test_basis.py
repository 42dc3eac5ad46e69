"""Sector enumeration against a brute-force product-space oracle."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenophot.basis import (
    LEVEL_CHARGE,
    BasisState,
    Diamond,
    Polarization,
    TwoLevel,
    VType,
    enumerate_sector,
)
from zenophot.hamiltonian import SystemSpec


def brute_force_count(n_waveguides, kinds, cap, charge):
    """Enumerate every occupation/level tuple and count the matching charge."""
    n_modes = 2 * n_waveguides
    count = 0
    for occ in itertools.product(range(cap + 1), repeat=n_modes):
        q_ph = sum(occ)
        if q_ph > charge:
            continue
        for levels in itertools.product(*(k.levels for k in kinds)):
            q = q_ph + sum(LEVEL_CHARGE[lv] for lv in levels)
            if q == charge:
                count += 1
    return count


def spec_for(n_waveguides, absorbers):
    return SystemSpec(n_waveguides=n_waveguides, absorbers=absorbers)


CONFIGS = [
    (2, {0: Diamond(), 1: Diamond()}),
    (2, {0: Diamond()}),
    (2, {0: VType(), 1: VType()}),
    (2, {0: TwoLevel(Polarization.R)}),
    (3, {0: Diamond(), 2: Diamond()}),
    (3, {0: Diamond(), 1: Diamond(), 2: Diamond()}),
    (3, {}),
]


@pytest.mark.parametrize("n,absorbers", CONFIGS)
@pytest.mark.parametrize("charge", [0, 1, 2, 3])
def test_dimension_matches_brute_force(n, absorbers, charge):
    spec = spec_for(n, absorbers)
    space = enumerate_sector(spec, charge)
    kinds = [k for _, k in spec.absorber_sites]
    assert space.dim == brute_force_count(n, kinds, charge, charge)


def test_vacuum_sector_is_single_state():
    spec = spec_for(2, {0: Diamond(), 1: Diamond()})
    space = enumerate_sector(spec, 0)
    assert space.dim == 1
    assert space.labels == ("0.0|G.G",)


def test_all_states_carry_the_sector_charge():
    spec = spec_for(3, {0: Diamond(), 2: Diamond()})
    space = enumerate_sector(spec, 3)
    assert all(s.charge() == 3 for s in space.states)


def test_enumeration_is_reproducible():
    spec = spec_for(2, {0: Diamond(), 1: Diamond()})
    a = enumerate_sector(spec, 2)
    b = enumerate_sector(spec, 2)
    assert a.labels == b.labels
    assert "\n".join(a.labels) == "\n".join(b.labels)


def test_index_round_trip():
    spec = spec_for(2, {0: Diamond(), 1: Diamond()})
    space = enumerate_sector(spec, 2)
    assert space.index_of(space.states[0]) == 0
    for k, s in enumerate(space.states):
        assert space.index_of(s) == k


def test_charge_mismatch_raises():
    spec = spec_for(2, {0: Diamond(), 1: Diamond()})
    space = enumerate_sector(spec, 2)
    wrong = BasisState((1, 0, 0, 0), ("G", "G"))  # charge 1 in a charge-2 space
    with pytest.raises(KeyError):
        space.index_of(wrong)


def test_unknown_state_raises():
    spec = spec_for(2, {0: Diamond(), 1: Diamond()})
    space = enumerate_sector(spec, 2)
    foreign = BasisState((2, 0, 0, 0), ("G", "X"))  # X is not a diamond level
    with pytest.raises(KeyError):
        space.index_of(foreign)


def test_negative_and_oversized_charge_rejected():
    spec = spec_for(2, {0: Diamond(), 1: Diamond()})
    with pytest.raises(ValueError):
        enumerate_sector(spec, -1)
    with pytest.raises(ValueError):
        enumerate_sector(spec, 1000)


def test_labels():
    assert BasisState((1, 0, 0, 1), ("G", "G")).label() == "R.L|G.G"
    assert BasisState((1, 1, 0, 0), ("G", "E")).label() == "RL.0|G.E"
    assert BasisState((0, 0, 0, 0), ()).label() == "0.0"
    assert BasisState((2, 1, 0, 0, 0, 0), ("MR",)).label() == "RRL.0.0|MR"


@settings(max_examples=30, deadline=None)
@given(charge=st.integers(min_value=0, max_value=3),
       config=st.sampled_from(CONFIGS))
def test_dimension_property(charge, config):
    n, absorbers = config
    spec = spec_for(n, absorbers)
    space = enumerate_sector(spec, charge)
    kinds = [k for _, k in spec.absorber_sites]
    assert space.dim == brute_force_count(n, kinds, charge, charge)
    # bijection: labels are unique
    assert len(set(space.labels)) == space.dim
