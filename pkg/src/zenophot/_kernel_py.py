"""Pure-Python (numpy/scipy) RK4 stepping kernel.

Fallback implementation of the same contract as the compiled ``_kernel``
extension: classic fourth-order fixed-step integration of
dpsi/dt = -i H(t) psi with H(t) evaluated at the sub-stage times.  The
compiled kernel is preferred at import time when available; this module is
what runs when the extension was not built, and is the reference the
benchmark compares against.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

KERNEL_NAME = "python"


def _envelope(t: float, rs: float, rd: float, fs: float, fd: float, shape: int) -> float:
    if t < rs:
        return 0.0
    if rd > 0.0 and t < rs + rd:
        x = (t - rs) / rd
    elif t <= fs:
        return 1.0
    elif fd > 0.0 and t < fs + fd:
        x = (fs + fd - t) / fd
    else:
        return 0.0
    if shape == 0:
        return x
    s = math.sin(0.5 * math.pi * x)
    return s * s


def rk4_evolve(indptr0, indices0, data0,
               indptr_t, indices_t, data_t,
               indptr_l, indices_l, data_l,
               psi0, t0, dt, t_end, n_steps, stride,
               theta_max, lambda_max,
               th_win, lm_win, shape,
               out_times, out_amps):
    """Run ``n_steps`` RK4 steps, recording every ``stride``-th state.

    The three CSR operands are passed as raw (indptr, indices, data) triples
    so the compiled kernel and this fallback share one calling convention.
    Stage times are clamped to ``t_end`` so float round-off never pushes an
    evaluation past the run window.  Records land in the preallocated
    ``out_times``/``out_amps``; row 0 is the initial state and the final
    step is always recorded.
    """
    dim = psi0.shape[0]
    h0 = sp.csr_matrix((data0, indices0, indptr0), shape=(dim, dim))
    ht = sp.csr_matrix((data_t, indices_t, indptr_t), shape=(dim, dim))
    hl = sp.csr_matrix((data_l, indices_l, indptr_l), shape=(dim, dim))
    th_rs, th_rd, th_fs, th_fd = th_win
    lm_rs, lm_rd, lm_fs, lm_fd = lm_win

    def deriv(t: float, v: np.ndarray) -> np.ndarray:
        if t > t_end:
            t = t_end
        y = h0.dot(v)
        ct = theta_max * _envelope(t, th_rs, th_rd, th_fs, th_fd, shape)
        if ct != 0.0:
            y = y + ct * ht.dot(v)
        cl = lambda_max * _envelope(t, lm_rs, lm_rd, lm_fs, lm_fd, shape)
        if cl != 0.0:
            y = y + cl * hl.dot(v)
        return -1j * y

    psi = psi0.astype(np.complex128, copy=True)
    out_times[0] = t0
    out_amps[0, :] = psi
    rec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(int(n_steps)):
        t = t0 + step * dt
        k1 = deriv(t, psi)
        k2 = deriv(t + half, psi + half * k1)
        k3 = deriv(t + half, psi + half * k2)
        k4 = deriv(t + dt, psi + dt * k3)
        psi += sixth * (k1 + 2.0 * (k2 + k3) + k4)
        done = step + 1
        if done % stride == 0 or done == n_steps:
            out_times[rec] = t0 + done * dt
            out_amps[rec, :] = psi
            rec += 1
    return rec
