"""Time-dependent Hamiltonian assembly.

The full Hamiltonian is split into three time-independent Hermitian blocks,

    H(t) = H0 + theta_max * f_theta(t) * H_theta + lambda_max * f_lambda(t) * H_lambda,

where ``f_theta``/``f_lambda`` are the dimensionless ramp envelopes in [0, 1].
H0 is diagonal (mode energies and absorber level energies), H_theta hops
photons between coupled waveguides, and H_lambda exchanges excitation between
a waveguide and its absorber.  All couplings are real, so each block is
exactly Hermitian by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np
import scipy.sparse as sp

from .basis import (
    AbsorberKind,
    BasisState,
    Diamond,
    HilbertSpace,
    Polarization,
    TwoLevel,
    VType,
)

_SHOULDER_SHAPES = ("sin2", "linear")


@dataclass(frozen=True)
class RampSchedule:
    """Piecewise on/plateau/off envelopes for the two couplings.

    The absorber coupling rises first over ``t_lambda_on``, holds its plateau
    for ``t_lambda_max`` and falls last; the waveguide coupling rises over
    ``t_theta_on`` once the absorber coupling has peaked, holds for
    ``t_theta_max`` and falls first.  Turn-off mirrors turn-on, so the whole
    schedule is symmetric about its midpoint.  Any slack between the two
    plateaus is split evenly around the waveguide window.
    """

    t_lambda_on: float
    t_theta_on: float
    t_theta_max: float
    t_lambda_max: float
    shoulder: str = "sin2"

    def __post_init__(self):
        for name in ("t_lambda_on", "t_theta_on", "t_theta_max", "t_lambda_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.shoulder not in _SHOULDER_SHAPES:
            raise ValueError(f"shoulder must be one of {_SHOULDER_SHAPES}")
        if self.t_lambda_max + 1e-12 < 2 * self.t_theta_on + self.t_theta_max:
            raise ValueError(
                "absorber plateau must cover the whole waveguide envelope "
                "(t_lambda_max >= 2*t_theta_on + t_theta_max)"
            )

    @classmethod
    def from_plateau(cls, t_theta_max: float, shoulder_frac: float = 0.1,
                     shoulder: str = "sin2") -> "RampSchedule":
        """Schedule with all four shoulders equal to ``shoulder_frac`` of the total duration."""
        if not 0 < shoulder_frac < 0.25:
            raise ValueError("shoulder_frac must lie in (0, 0.25)")
        total = t_theta_max / (1.0 - 4.0 * shoulder_frac)
        rise = shoulder_frac * total
        return cls(
            t_lambda_on=rise,
            t_theta_on=rise,
            t_theta_max=t_theta_max,
            t_lambda_max=2 * rise + t_theta_max,
            shoulder=shoulder,
        )

    @classmethod
    def constant(cls, duration: float) -> "RampSchedule":
        """Both couplings switched fully on for the whole window (no shoulders)."""
        return cls(0.0, 0.0, duration, duration)

    @property
    def total_duration(self) -> float:
        return 2 * self.t_lambda_on + self.t_lambda_max

    @property
    def theta_area(self) -> float:
        """Integral of the waveguide envelope (both shoulder shapes integrate to dur/2)."""
        return self.t_theta_max + self.t_theta_on

    def window(self, which: str) -> tuple[float, float, float, float]:
        """(rise_start, rise_duration, fall_start, fall_duration) for one envelope."""
        if which == "lambda":
            return (0.0, self.t_lambda_on, self.t_lambda_on + self.t_lambda_max,
                    self.t_lambda_on)
        if which == "theta":
            slack = self.t_lambda_max - (2 * self.t_theta_on + self.t_theta_max)
            rise_start = self.t_lambda_on + 0.5 * slack
            fall_start = rise_start + self.t_theta_on + self.t_theta_max
            return (rise_start, self.t_theta_on, fall_start, self.t_theta_on)
        raise ValueError(f"unknown envelope {which!r}")

    def with_plateau(self, t_theta_max: float) -> "RampSchedule":
        """Same shoulders, new waveguide plateau (the calibration knob)."""
        return replace(
            self,
            t_theta_max=t_theta_max,
            t_lambda_max=2 * self.t_theta_on + t_theta_max,
        )


def _shoulder_value(x: float, shape: str) -> float:
    if shape == "linear":
        return x
    s = math.sin(0.5 * math.pi * x)
    return s * s


def envelope(ramp: RampSchedule, which: str, t: float) -> float:
    """Envelope value in [0, 1] at time ``t``; clamped to 0 outside the run window."""
    rise_start, rise_dur, fall_start, fall_dur = ramp.window(which)
    if t < rise_start:
        return 0.0
    if rise_dur > 0 and t < rise_start + rise_dur:
        return _shoulder_value((t - rise_start) / rise_dur, ramp.shoulder)
    if t <= fall_start:
        return 1.0
    if fall_dur > 0 and t < fall_start + fall_dur:
        return _shoulder_value((fall_start + fall_dur - t) / fall_dur, ramp.shoulder)
    return 0.0


def _chain_edges(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((w, w + 1) for w in range(n - 1))


@dataclass(frozen=True)
class SystemSpec:
    """Geometry, couplings and energies of one simulated device.

    Frequencies are angular (hbar = 1).  ``detuning`` offsets every
    single-photon absorber level (the middle levels of diamond and V
    absorbers, and the excited level of a two-level absorber) from the bare
    absorber frequency ``omega0``.
    """

    n_waveguides: int = 2
    absorbers: Mapping[int, AbsorberKind] = field(default_factory=dict)
    edges: Optional[tuple[tuple[int, int], ...]] = None
    omega: float = 1.0
    omega0: float = 1.0
    detuning: float = 1.0
    theta_max: float = 1.0 / 164.0
    lambda_max: float = 0.2
    ramp: RampSchedule = field(default_factory=lambda: RampSchedule.from_plateau(1000.0))
    photon_cap: Optional[int] = None

    def __post_init__(self):
        if self.n_waveguides not in (2, 3):
            raise ValueError("n_waveguides must be 2 or 3")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.theta_max < 0 or self.lambda_max < 0:
            raise ValueError("couplings must be non-negative")
        edges = self.edges
        if edges is None:
            object.__setattr__(self, "edges", _chain_edges(self.n_waveguides))
        else:
            edges = tuple(tuple(e) for e in edges)
            if sorted(edges) != sorted(_chain_edges(self.n_waveguides)):
                raise ValueError(
                    f"coupling edges must form the open chain over {self.n_waveguides} waveguides"
                )
            object.__setattr__(self, "edges", edges)
        absorbers = dict(self.absorbers)
        for w in absorbers:
            if not 0 <= w < self.n_waveguides:
                raise ValueError(f"absorber placed on waveguide {w}, but only "
                                 f"{self.n_waveguides} waveguides exist")
        object.__setattr__(self, "absorbers", absorbers)

    @property
    def absorber_sites(self) -> tuple[tuple[int, AbsorberKind], ...]:
        """Absorber (waveguide, kind) pairs in ascending waveguide order."""
        return tuple(sorted(self.absorbers.items()))

    # -- JSON round trip -------------------------------------------------

    def to_dict(self) -> dict:
        def kind_dict(kind: AbsorberKind) -> dict:
            if isinstance(kind, Diamond):
                return {"kind": "diamond"}
            if isinstance(kind, VType):
                return {"kind": "vtype"}
            if isinstance(kind, TwoLevel):
                return {"kind": "two_level", "pol": kind.pol.value}
            raise TypeError(f"unknown absorber kind {kind!r}")

        return {
            "n_waveguides": self.n_waveguides,
            "absorbers": {str(w): kind_dict(k) for w, k in self.absorber_sites},
            "edges": [list(e) for e in self.edges],
            "omega": self.omega,
            "omega0": self.omega0,
            "detuning": self.detuning,
            "theta_max": self.theta_max,
            "lambda_max": self.lambda_max,
            "ramp": {
                "t_lambda_on": self.ramp.t_lambda_on,
                "t_theta_on": self.ramp.t_theta_on,
                "t_theta_max": self.ramp.t_theta_max,
                "t_lambda_max": self.ramp.t_lambda_max,
                "shoulder": self.ramp.shoulder,
            },
            "photon_cap": self.photon_cap,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemSpec":
        def kind_from(kd: dict) -> AbsorberKind:
            name = kd["kind"]
            if name == "diamond":
                return Diamond()
            if name == "vtype":
                return VType()
            if name == "two_level":
                return TwoLevel(Polarization(kd.get("pol", "R")))
            raise ValueError(f"unknown absorber kind {name!r}")

        ramp = RampSchedule(**d["ramp"])
        return cls(
            n_waveguides=int(d["n_waveguides"]),
            absorbers={int(w): kind_from(kd) for w, kd in d.get("absorbers", {}).items()},
            edges=tuple(tuple(e) for e in d["edges"]) if d.get("edges") else None,
            omega=float(d.get("omega", 1.0)),
            omega0=float(d.get("omega0", 1.0)),
            detuning=float(d.get("detuning", 1.0)),
            theta_max=float(d.get("theta_max", 1.0 / 164.0)),
            lambda_max=float(d.get("lambda_max", 0.2)),
            ramp=ramp,
            photon_cap=d.get("photon_cap"),
        )


@dataclass(frozen=True)
class HamiltonianBlocks:
    """The three Hermitian blocks of H(t), restricted to one charge sector.

    ``rotating`` marks whether omega * Q has been subtracted from the
    diagonal.  Since the charge Q is conserved, the rotating frame changes
    amplitudes only by a global phase while removing the fast carrier
    frequency from the integrator's step-size budget.
    """

    h0: sp.csr_matrix
    h_theta: sp.csr_matrix
    h_lambda: sp.csr_matrix
    space: HilbertSpace
    rotating: bool = True

    def norm_bound(self, spec: SystemSpec) -> float:
        """Cheap upper bound on ||H(t)||: max absolute row sum at full plateau."""
        m = (abs(self.h0) + spec.theta_max * abs(self.h_theta)
             + spec.lambda_max * abs(self.h_lambda))
        rows = np.asarray(abs(m).sum(axis=1)).ravel()
        return float(rows.max()) if rows.size else 0.0


def _mode_index(w: int, pol: Polarization) -> int:
    return 2 * w + (0 if pol is Polarization.R else 1)


def build_blocks(spec: SystemSpec, space: HilbertSpace, rotating: bool = True) -> HamiltonianBlocks:
    """Assemble H0, H_theta and H_lambda over the enumerated sector.

    Each hop/exchange term is added in both directions with the identical
    bosonic sqrt factor, so Hermiticity is exact rather than approximate.
    Elements whose target state would exceed the photon cap are dropped,
    which projects the Hamiltonian onto the capped space (a no-op for the
    default cap, since the cap then equals the sector charge).
    """
    dim = space.dim
    cap = spec.photon_cap if spec.photon_cap is not None else space.charge
    sites = spec.absorber_sites

    diag = np.zeros(dim)
    for k, state in enumerate(space.states):
        e = spec.omega * state.photon_count()
        for si, (_, kind) in enumerate(sites):
            e += kind.level_energy(state.levels[si], spec.omega0, spec.detuning)
        if rotating:
            e -= spec.omega * space.charge
        diag[k] = e
    h0 = sp.csr_matrix(sp.diags(diag, format="csr"), dtype=np.complex128)

    rows_t: list[int] = []
    cols_t: list[int] = []
    vals_t: list[float] = []
    rows_l: list[int] = []
    cols_l: list[int] = []
    vals_l: list[float] = []

    def add_hop(rows, cols, vals, state, k, src_mode, dst_mode):
        occ = state.occupations
        n_src = occ[src_mode]
        if n_src == 0 or occ[dst_mode] >= cap:
            return
        amp = math.sqrt(n_src) * math.sqrt(occ[dst_mode] + 1)
        new_occ = list(occ)
        new_occ[src_mode] -= 1
        new_occ[dst_mode] += 1
        target = BasisState(tuple(new_occ), state.levels)
        rows.append(space.index[target])
        cols.append(k)
        vals.append(amp)

    for k, state in enumerate(space.states):
        for u, v in spec.edges:
            for pol in (Polarization.R, Polarization.L):
                mu, mv = _mode_index(u, pol), _mode_index(v, pol)
                add_hop(rows_t, cols_t, vals_t, state, k, mu, mv)
                add_hop(rows_t, cols_t, vals_t, state, k, mv, mu)

        for si, (w, kind) in enumerate(sites):
            lv = state.levels[si]
            for lo, hi, pol in kind.transitions():
                mode = _mode_index(w, pol)
                occ = state.occupations
                if lv == lo and occ[mode] >= 1:
                    # absorb: photon out of the waveguide, level up
                    amp = math.sqrt(occ[mode])
                    new_occ = list(occ)
                    new_occ[mode] -= 1
                    new_lev = list(state.levels)
                    new_lev[si] = hi
                    target = BasisState(tuple(new_occ), tuple(new_lev))
                    rows_l.append(space.index[target])
                    cols_l.append(k)
                    vals_l.append(amp)
                elif lv == hi and occ[mode] < cap:
                    # emit: level down, photon back into the waveguide
                    amp = math.sqrt(occ[mode] + 1)
                    new_occ = list(occ)
                    new_occ[mode] += 1
                    new_lev = list(state.levels)
                    new_lev[si] = lo
                    target = BasisState(tuple(new_occ), tuple(new_lev))
                    rows_l.append(space.index[target])
                    cols_l.append(k)
                    vals_l.append(amp)

    h_theta = sp.csr_matrix(
        sp.coo_matrix((np.asarray(vals_t, dtype=np.complex128), (rows_t, cols_t)),
                      shape=(dim, dim))
    )
    h_lambda = sp.csr_matrix(
        sp.coo_matrix((np.asarray(vals_l, dtype=np.complex128), (rows_l, cols_l)),
                      shape=(dim, dim))
    )
    h_theta.sum_duplicates()
    h_lambda.sum_duplicates()
    h_theta.sort_indices()
    h_lambda.sort_indices()
    h0.sort_indices()
    return HamiltonianBlocks(h0, h_theta, h_lambda, space, rotating)


def hamiltonian_at(blocks: HamiltonianBlocks, spec: SystemSpec, t: float) -> sp.csr_matrix:
    """H(t) as a sparse matrix: H0 plus the envelope-weighted coupling blocks."""
    c_theta = spec.theta_max * envelope(spec.ramp, "theta", t)
    c_lambda = spec.lambda_max * envelope(spec.ramp, "lambda", t)
    return (blocks.h0 + c_theta * blocks.h_theta + c_lambda * blocks.h_lambda).tocsr()


def swap_permutation(space: HilbertSpace, spec: SystemSpec) -> sp.csr_matrix:
    """Unitary that exchanges the two outer waveguides (and their absorber sites).

    Only defined when the exchanged waveguides carry identical absorber
    kinds; used to verify the mirror symmetry of symmetric devices.
    """
    n = spec.n_waveguides
    wmap = {0: n - 1, n - 1: 0}
    if n == 3:
        wmap[1] = 1
    sites = spec.absorber_sites
    site_wgs = [w for w, _ in sites]
    kind_by_wg = dict(sites)
    for w, kind in sites:
        partner = wmap[w]
        if kind_by_wg.get(partner) != kind:
            raise ValueError("swap symmetry needs identical absorbers on mirrored waveguides")

    perm = np.zeros(space.dim, dtype=np.int64)
    for k, state in enumerate(space.states):
        occ = list(state.occupations)
        new_occ = list(occ)
        for w in range(n):
            t = wmap[w]
            new_occ[2 * t] = occ[2 * w]
            new_occ[2 * t + 1] = occ[2 * w + 1]
        new_lev = list(state.levels)
        for si, w in enumerate(site_wgs):
            ti = site_wgs.index(wmap[w])
            new_lev[ti] = state.levels[si]
        target = BasisState(tuple(new_occ), tuple(new_lev))
        perm[k] = space.index[target]
    data = np.ones(space.dim, dtype=np.complex128)
    return sp.csr_matrix((data, (perm, np.arange(space.dim))), shape=(space.dim, space.dim))
