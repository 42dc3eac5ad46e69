"""Derived quantities: probabilities, reduced states, fidelity, phases, entanglement.

Everything here is a pure function of recorded amplitudes.  The photonic
reduction traces out the absorber levels; qubit projections map the
anti-bunched photonic subspace (exactly one photon per waveguide, absorbers
back in their ground states) onto a register with basis {R, L} per waveguide.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .basis import BasisState, HilbertSpace
from .evolve import StateVector, TimeSeries

#: amplitudes below this magnitude have numerically meaningless phases
PHASE_FLOOR = 1e-6


class UndefinedPhaseError(ValueError):
    """Raised when a relative phase is requested for a near-zero amplitude."""


def probabilities(series: TimeSeries, tracked: Sequence[BasisState | str]) -> dict[str, np.ndarray]:
    """Per-state probability time series for the tracked basis states."""
    out: dict[str, np.ndarray] = {}
    for s in tracked:
        if isinstance(s, str):
            k = series.space.index_of_label(s)
            label = s
        else:
            k = series.space.index_of(s)
            label = s.label()
        out[label] = np.abs(series.amplitudes[:, k]) ** 2
    return out


# -- photonic reduction ---------------------------------------------------


class PhotonicBasis:
    """Ordered photonic configurations appearing in a sector (levels traced out)."""

    def __init__(self, space: HilbertSpace):
        configs: list[tuple[int, ...]] = []
        seen: dict[tuple[int, ...], int] = {}
        groups: dict[tuple[str, ...], list[tuple[int, int]]] = {}
        for k, s in enumerate(space.states):
            if s.occupations not in seen:
                seen[s.occupations] = len(configs)
                configs.append(s.occupations)
            groups.setdefault(s.levels, []).append((seen[s.occupations], k))
        self.space = space
        self.configs = tuple(configs)
        self.index = seen
        self._level_groups = groups
        self.labels = tuple(
            BasisState(c, ()).label() for c in self.configs
        )

    @property
    def dim(self) -> int:
        return len(self.configs)


def reduce_to_photons(psi: StateVector | np.ndarray, space: HilbertSpace,
                      basis: Optional[PhotonicBasis] = None) -> tuple[np.ndarray, PhotonicBasis]:
    """Partial trace over absorber levels.

    Returns the full photonic marginal (trace exactly 1) as a density matrix
    over ``PhotonicBasis.configs`` together with that basis.  The marginal is
    block diagonal in total photon number: configurations with different
    photon counts never share an absorber-level assignment within one charge
    sector.
    """
    amps = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
    pb = basis or PhotonicBasis(space)
    rho = np.zeros((pb.dim, pb.dim), dtype=complex)
    for pairs in pb._level_groups.values():
        v = np.zeros(pb.dim, dtype=complex)
        for cfg_idx, k in pairs:
            v[cfg_idx] = amps[k]
        rho += np.outer(v, v.conj())
    return rho, pb


def fidelity(target: np.ndarray, sigma: np.ndarray) -> float:
    """Pure-state fidelity <psi|sigma|psi> of a density matrix against a pure target."""
    target = np.asarray(target, dtype=complex)
    if sigma.shape != (target.size, target.size):
        raise ValueError(f"dimension mismatch: target {target.size}, sigma {sigma.shape}")
    val = np.real(np.vdot(target, sigma @ target))
    n = np.real(np.vdot(target, target))
    return float(val / n)


def fidelity_series(series: TimeSeries, target_amplitudes: dict[str, complex],
                    basis: Optional[PhotonicBasis] = None) -> np.ndarray:
    """Fidelity of the photon-reduced state against a pure photonic target, per record.

    Exploits rho = sum_g |v_g><v_g| over absorber-level groups, so each
    record costs O(dim) instead of a full density-matrix build.
    """
    pb = basis or PhotonicBasis(series.space)
    tgt = np.zeros(pb.dim, dtype=complex)
    for label, a in target_amplitudes.items():
        tgt[pb.labels.index(label)] = a
    tgt = tgt / np.linalg.norm(tgt)

    out = np.zeros(len(series))
    for pairs in pb._level_groups.values():
        idx_cfg = np.array([c for c, _ in pairs])
        idx_full = np.array([k for _, k in pairs])
        overlaps = series.amplitudes[:, idx_full] @ tgt[idx_cfg].conj()
        out += np.abs(overlaps) ** 2
    return out


def relative_phase(psi: StateVector, space: HilbertSpace,
                   s1: BasisState | str, s2: BasisState | str,
                   floor: float = PHASE_FLOOR) -> float:
    """arg(amp(s2)) - arg(amp(s1)), wrapped to (-pi, pi].

    Raises UndefinedPhaseError if either amplitude magnitude is below the floor.
    """
    def amp(s):
        k = space.index_of_label(s) if isinstance(s, str) else space.index_of(s)
        return psi.amplitudes[k]

    a1, a2 = amp(s1), amp(s2)
    if abs(a1) < floor or abs(a2) < floor:
        raise UndefinedPhaseError(
            f"amplitude below phase floor {floor:g} (|a1|={abs(a1):.2e}, |a2|={abs(a2):.2e})"
        )
    phase = cmath.phase(a2) - cmath.phase(a1)
    phase = (phase + math.pi) % (2 * math.pi) - math.pi
    if phase == -math.pi:
        phase = math.pi
    return phase


# -- qubit projections ----------------------------------------------------


def anti_bunched_configs(n_waveguides: int, pols: Sequence[str]) -> list[tuple[int, ...]]:
    """Occupation tuples with exactly one photon of the given polarization per waveguide."""
    cfg = [0] * (2 * n_waveguides)
    for w, p in enumerate(pols):
        cfg[2 * w + (0 if p == "R" else 1)] = 1
    return [tuple(cfg)]


def _qubit_configs(n_waveguides: int) -> list[tuple[int, ...]]:
    configs = []
    for code in range(2 ** n_waveguides):
        cfg = [0] * (2 * n_waveguides)
        for w in range(n_waveguides):
            bit = (code >> (n_waveguides - 1 - w)) & 1  # 0 -> R, 1 -> L
            cfg[2 * w + bit] = 1
        configs.append(tuple(cfg))
    return configs


@dataclass
class QubitProjection:
    """Anti-bunched subspace of a photonic state mapped to an n-qubit register.

    ``weight`` is the probability mass captured by the projection; the
    register state/density matrix is renormalized to trace 1.
    """

    rho: np.ndarray
    weight: float
    n_qubits: int
    labels: tuple[str, ...] = field(default=())

    @property
    def reliable(self) -> bool:
        return self.weight >= 0.5


def project_to_qubits(rho_ph: np.ndarray, pb: PhotonicBasis) -> QubitProjection:
    """Restrict a photonic density matrix to one-photon-per-waveguide configurations."""
    n = len(pb.configs[0]) // 2
    configs = _qubit_configs(n)
    idx = np.array([pb.index[c] for c in configs])
    sub = rho_ph[np.ix_(idx, idx)]
    weight = float(np.real(np.trace(sub)))
    if weight > 0:
        sub = sub / weight
    labels = tuple("".join("R" if (code >> (n - 1 - w)) & 1 == 0 else "L" for w in range(n))
                   for code in range(2 ** n))
    return QubitProjection(sub, weight, n, labels)


def qubit_projection_of_state(psi: StateVector, space: HilbertSpace) -> QubitProjection:
    rho, pb = reduce_to_photons(psi, space)
    return project_to_qubits(rho, pb)


def concurrence(rho: np.ndarray, psd_tol: float = 1e-9) -> float:
    """Two-qubit Wootters concurrence: max(0, l1 - l2 - l3 - l4).

    The l_i are the square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y),
    sorted descending.  Raises ValueError for inputs that are not valid 4x4
    density matrices (non-Hermitian, trace far from 1, or negative beyond
    tolerance).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence needs a 4x4 two-qubit density matrix")
    if np.abs(rho - rho.conj().T).max() > 1e-8:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-6:
        raise ValueError("density matrix must have unit trace")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -psd_tol:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.2e}")

    yy = np.array([[0, 0, 0, -1],
                   [0, 0, 1, 0],
                   [0, 1, 0, 0],
                   [-1, 0, 0, 0]], dtype=complex)
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.real(np.linalg.eigvals(r)), 0.0, None))
    lam.sort()
    return float(max(0.0, lam[-1] - lam[-2] - lam[-3] - lam[-4]))


@dataclass(frozen=True)
class WStateFidelity:
    """Phase-maximized overlap with the three-qubit W manifold."""

    value: float
    projection_weight: float

    @property
    def reliable(self) -> bool:
        return self.projection_weight >= 0.5


def w_state_fidelity(psi: StateVector, space: HilbertSpace) -> WStateFidelity:
    """Best overlap-squared with (e^{ip1}|RRL> + e^{ip2}|RLR> + e^{ip3}|LRR>)/sqrt(3).

    Maximizing over the three free phases gives the closed form
    (|a| + |b| + |c|)^2 / 3 for the renormalized projected amplitudes.  The
    projection weight onto the one-photon-per-waveguide subspace is recorded;
    below 0.5 the number is flagged unreliable via ``reliable``.
    """
    proj = qubit_projection_of_state(psi, space)
    if proj.n_qubits != 3:
        raise ValueError("W-state fidelity needs a three-waveguide state")
    picks = [proj.labels.index(lab) for lab in ("RRL", "RLR", "LRR")]
    mags = [math.sqrt(max(0.0, float(np.real(proj.rho[k, k])))) for k in picks]
    value = sum(mags) ** 2 / 3.0
    return WStateFidelity(value, proj.weight)


# -- run summaries --------------------------------------------------------


def bunched_labels(space: HilbertSpace) -> tuple[str, ...]:
    """Labels of all-ground states with at least two photons in one waveguide."""
    n = len(space.states[0].occupations) // 2 if space.dim else 0
    out = []
    for s in space.states:
        if s.levels and any(lv != "G" for lv in s.levels):
            continue
        if any(s.waveguide_photons(w) >= 2 for w in range(n)):
            out.append(s.label())
    return tuple(out)


def max_bunched_probability(series: TimeSeries) -> float:
    """Max over time of the summed probability of bunched all-ground states."""
    labels = bunched_labels(series.space)
    if not labels:
        return 0.0
    idx = [series.space.index_of_label(lab) for lab in labels]
    return float(np.sum(np.abs(series.amplitudes[:, idx]) ** 2, axis=1).max())


@dataclass
class RunSummary:
    """Headline numbers of one evolution."""

    final_probabilities: dict[str, float]
    norm_drift: float
    max_bunched_probability: float
    final_fidelity: Optional[float] = None
    relative_phase: Optional[float] = None
    concurrence: Optional[float] = None
    w_fidelity: Optional[float] = None
    w_projection_weight: Optional[float] = None
    extras: dict = field(default_factory=dict)
    final_amplitudes: dict[str, tuple[float, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "final_probabilities": self.final_probabilities,
            "norm_drift": self.norm_drift,
            "max_bunched_probability": self.max_bunched_probability,
        }
        for key in ("final_fidelity", "relative_phase", "concurrence",
                    "w_fidelity", "w_projection_weight"):
            val = getattr(self, key)
            if val is not None:
                d[key] = val
        if self.final_amplitudes:
            d["final_amplitudes"] = {k: list(v) for k, v in self.final_amplitudes.items()}
        d.update(self.extras)
        return d
