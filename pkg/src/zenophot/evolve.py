"""Fixed-step Schrodinger-equation integration with norm-drift auditing.

Deterministic RK4 with no adaptivity and no mid-run renormalization: the
norm drift over a run is the integrator's quality signal and is checked
against a tolerance rather than hidden.  Step size defaults to a fixed
fraction of the inverse plateau Hamiltonian norm, with an extra cap so ramp
shoulders are always well resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import get_kernel
from .basis import HilbertSpace
from .hamiltonian import HamiltonianBlocks, SystemSpec

#: dt is chosen so that dt * (plateau norm bound) equals this.
DT_NORM_FACTOR = 0.05
#: dt never exceeds the shortest nonzero ramp shoulder divided by this.
SHOULDER_RESOLUTION = 64.0
#: hard validity ceiling enforced at run start.
DT_NORM_LIMIT = 0.1


class NormDriftError(RuntimeError):
    """Norm drift exceeded the configured tolerance; the step size is too coarse."""


@dataclass
class StateVector:
    """Complex amplitudes over a sector basis at one instant."""

    amplitudes: np.ndarray
    time: float = 0.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.time)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    ``dt=None`` selects the default step from the plateau norm bound, scaled
    by ``dt_scale`` (used by scenarios whose drift budget needs a finer step
    than the generic default, e.g. with strongly populated detuned levels).
    ``stride`` controls how often states are recorded (every k-th step);
    the initial and final states are always recorded.
    """

    dt: Optional[float] = None
    method: str = "rk4"
    drift_tolerance: float = 1e-8
    stride: int = 100
    dt_scale: float = 1.0

    def __post_init__(self):
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}; only 'rk4' is implemented")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.drift_tolerance <= 0:
            raise ValueError("drift_tolerance must be positive")
        if self.dt_scale <= 0 or self.dt_scale > 1:
            raise ValueError("dt_scale must lie in (0, 1]")


class TimeSeries:
    """Recorded amplitudes of one evolution, on a stride-spaced time grid."""

    def __init__(self, times: np.ndarray, amplitudes: np.ndarray, space: HilbertSpace):
        self.times = times
        self.amplitudes = amplitudes
        self.space = space

    def __len__(self) -> int:
        return len(self.times)

    def probabilities(self) -> np.ndarray:
        """|amplitude|^2, shape (n_records, dim)."""
        return np.abs(self.amplitudes) ** 2

    def probability_of(self, label: str) -> np.ndarray:
        k = self.space.index_of_label(label)
        return np.abs(self.amplitudes[:, k]) ** 2

    @property
    def final_state(self) -> StateVector:
        return StateVector(self.amplitudes[-1].copy(), float(self.times[-1]))

    def norm_drift(self) -> float:
        norms = np.sum(np.abs(self.amplitudes) ** 2, axis=1)
        return float(np.max(np.abs(norms - 1.0)))

    def write_csv(self, fh) -> None:
        """Probability table: column 1 is time, one column per basis state."""
        fh.write("time," + ",".join(self.space.labels) + "\n")
        probs = self.probabilities()
        for t, row in zip(self.times, probs):
            fh.write(f"{t:.12e}," + ",".join(f"{p:.12e}" for p in row) + "\n")


def norm_drift(series: TimeSeries) -> float:
    """Max over recorded steps of ||psi||^2 - 1| (the unitarity proxy)."""
    if len(series) == 0:
        raise ValueError("empty time series")
    return series.norm_drift()


def default_dt(spec: SystemSpec, blocks: HamiltonianBlocks) -> float:
    """Step size from the plateau norm bound, capped by shoulder resolution."""
    bound = blocks.norm_bound(spec)
    dt = DT_NORM_FACTOR / bound if bound > 0 else spec.ramp.total_duration / 1000.0
    shoulders = [d for d in (spec.ramp.t_lambda_on, spec.ramp.t_theta_on) if d > 0]
    if shoulders:
        dt = min(dt, min(shoulders) / SHOULDER_RESOLUTION)
    return dt


def _csr_triple(m):
    return (m.indptr.astype(np.int32), m.indices.astype(np.int32),
            m.data.astype(np.complex128))


def evolve(spec: SystemSpec, blocks: HamiltonianBlocks, space: HilbertSpace,
           psi0: StateVector, cfg: Optional[IntegratorConfig] = None,
           backend: Optional[str] = None,
           duration: Optional[float] = None) -> TimeSeries:
    """Integrate -i H(t) psi from t=0 over the full ramp window.

    Raises NormDriftError if the accumulated norm drift exceeds the
    configured tolerance (the remedy is a smaller dt), and ValueError when
    the requested dt violates the dt * ||H|| <= 0.1 validity ceiling.
    """
    cfg = cfg or IntegratorConfig()
    amps = np.asarray(psi0.amplitudes, dtype=np.complex128)
    if amps.shape != (space.dim,):
        raise ValueError(f"state has dimension {amps.shape}, space has {space.dim}")
    nrm = np.linalg.norm(amps)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"initial state must be normalized (got ||psi|| = {nrm})")

    total = duration if duration is not None else spec.ramp.total_duration
    if total <= 0:
        raise ValueError("run window must have positive duration")
    bound = blocks.norm_bound(spec)
    dt = cfg.dt if cfg.dt is not None else cfg.dt_scale * default_dt(spec, blocks)
    if bound > 0 and dt * bound > DT_NORM_LIMIT:
        raise ValueError(
            f"dt * ||H|| = {dt * bound:.3g} exceeds {DT_NORM_LIMIT}; reduce dt"
        )
    n_steps = max(1, math.ceil(total / dt))
    dt = total / n_steps  # land exactly on the end of the window

    stride = cfg.stride
    n_records = 1 + n_steps // stride + (1 if n_steps % stride else 0)
    out_times = np.empty(n_records)
    out_amps = np.empty((n_records, space.dim), dtype=np.complex128)

    kern = get_kernel(backend)
    i0, j0, d0 = _csr_triple(blocks.h0)
    it, jt, dth = _csr_triple(blocks.h_theta)
    il, jl, dl = _csr_triple(blocks.h_lambda)
    shape_code = 0 if spec.ramp.shoulder == "linear" else 1
    rec = kern.rk4_evolve(
        i0, j0, d0, it, jt, dth, il, jl, dl,
        amps, 0.0, dt, total, n_steps, stride,
        spec.theta_max, spec.lambda_max,
        np.asarray(spec.ramp.window("theta")),
        np.asarray(spec.ramp.window("lambda")),
        shape_code, out_times, out_amps,
    )
    if rec != n_records:
        raise AssertionError(f"kernel recorded {rec} rows, expected {n_records}")

    series = TimeSeries(out_times, out_amps, space)
    drift = series.norm_drift()
    if drift > cfg.drift_tolerance:
        raise NormDriftError(
            f"norm drift {drift:.3e} exceeds tolerance {cfg.drift_tolerance:.1e}; "
            f"re-run with a smaller dt (current dt = {dt:.3e})"
        )
    return series
