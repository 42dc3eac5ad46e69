# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 stepping kernel.

Hot inner loop of the simulator: fixed-step fourth-order integration of
dpsi/dt = -i H(t) psi where H(t) = H0 + c_theta(t) H_theta + c_lambda(t) H_lambda
is applied as three CSR matvecs per stage.  Same calling convention as the
pure-Python fallback in ``_kernel_py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, sin

cnp.import_array()

KERNEL_NAME = "compiled"


cdef inline double _envelope(double t, double rs, double rd, double fs, double fd,
                             int shape) noexcept nogil:
    cdef double x, s
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
    s = sin(0.5 * M_PI * x)
    return s * s


cdef inline void _csr_axpy(const int[::1] indptr, const int[::1] indices,
                           const double complex[::1] data,
                           const double complex[::1] v, double complex[::1] out,
                           double complex alpha, Py_ssize_t dim) noexcept nogil:
    cdef Py_ssize_t i, jj
    cdef double complex acc
    for i in range(dim):
        acc = 0
        for jj in range(indptr[i], indptr[i + 1]):
            acc = acc + data[jj] * v[indices[jj]]
        out[i] = out[i] + alpha * acc


cdef void _deriv(const int[::1] i0, const int[::1] j0, const double complex[::1] d0,
                 const int[::1] it, const int[::1] jt, const double complex[::1] dt_,
                 const int[::1] il, const int[::1] jl, const double complex[::1] dl,
                 double t, double t_end, double theta_max, double lambda_max,
                 double th_rs, double th_rd, double th_fs, double th_fd,
                 double lm_rs, double lm_rd, double lm_fs, double lm_fd, int shape,
                 const double complex[::1] v, double complex[::1] out,
                 Py_ssize_t dim) noexcept nogil:
    cdef Py_ssize_t i
    cdef double ct, cl
    cdef double complex minus_i = -1j
    if t > t_end:
        t = t_end
    for i in range(dim):
        out[i] = 0
    _csr_axpy(i0, j0, d0, v, out, minus_i, dim)
    ct = theta_max * _envelope(t, th_rs, th_rd, th_fs, th_fd, shape)
    if ct != 0.0:
        _csr_axpy(it, jt, dt_, v, out, minus_i * ct, dim)
    cl = lambda_max * _envelope(t, lm_rs, lm_rd, lm_fs, lm_fd, shape)
    if cl != 0.0:
        _csr_axpy(il, jl, dl, v, out, minus_i * cl, dim)


def rk4_evolve(const int[::1] i0, const int[::1] j0, const double complex[::1] d0,
               const int[::1] it, const int[::1] jt, const double complex[::1] dth,
               const int[::1] il, const int[::1] jl, const double complex[::1] dl,
               cnp.ndarray[cnp.complex128_t, ndim=1] psi0,
               double t0, double dt, double t_end, Py_ssize_t n_steps, Py_ssize_t stride,
               double theta_max, double lambda_max,
               th_win, lm_win, int shape,
               double[::1] out_times, double complex[:, ::1] out_amps):
    """Run ``n_steps`` RK4 steps; row 0 of the outputs is the initial state."""
    cdef Py_ssize_t dim = psi0.shape[0]
    cdef double th_rs = th_win[0], th_rd = th_win[1], th_fs = th_win[2], th_fd = th_win[3]
    cdef double lm_rs = lm_win[0], lm_rd = lm_win[1], lm_fs = lm_win[2], lm_fd = lm_win[3]

    cdef cnp.ndarray[cnp.complex128_t, ndim=1] psi_arr = psi0.copy()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k1_a = np.empty(dim, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k2_a = np.empty(dim, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k3_a = np.empty(dim, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k4_a = np.empty(dim, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] tmp_a = np.empty(dim, dtype=np.complex128)

    cdef double complex[::1] psi = psi_arr
    cdef double complex[::1] k1 = k1_a, k2 = k2_a, k3 = k3_a, k4 = k4_a, tmp = tmp_a

    cdef Py_ssize_t step, i, rec = 1
    cdef double t, half = 0.5 * dt, sixth = dt / 6.0

    out_times[0] = t0
    for i in range(dim):
        out_amps[0, i] = psi[i]

    with nogil:
        for step in range(n_steps):
            t = t0 + step * dt
            _deriv(i0, j0, d0, it, jt, dth, il, jl, dl, t, t_end,
                   theta_max, lambda_max, th_rs, th_rd, th_fs, th_fd,
                   lm_rs, lm_rd, lm_fs, lm_fd, shape, psi, k1, dim)
            for i in range(dim):
                tmp[i] = psi[i] + half * k1[i]
            _deriv(i0, j0, d0, it, jt, dth, il, jl, dl, t + half, t_end,
                   theta_max, lambda_max, th_rs, th_rd, th_fs, th_fd,
                   lm_rs, lm_rd, lm_fs, lm_fd, shape, tmp, k2, dim)
            for i in range(dim):
                tmp[i] = psi[i] + half * k2[i]
            _deriv(i0, j0, d0, it, jt, dth, il, jl, dl, t + half, t_end,
                   theta_max, lambda_max, th_rs, th_rd, th_fs, th_fd,
                   lm_rs, lm_rd, lm_fs, lm_fd, shape, tmp, k3, dim)
            for i in range(dim):
                tmp[i] = psi[i] + dt * k3[i]
            _deriv(i0, j0, d0, it, jt, dth, il, jl, dl, t + dt, t_end,
                   theta_max, lambda_max, th_rs, th_rd, th_fs, th_fd,
                   lm_rs, lm_rd, lm_fs, lm_fd, shape, tmp, k4, dim)
            for i in range(dim):
                psi[i] = psi[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
            if (step + 1) % stride == 0 or step + 1 == n_steps:
                with gil:
                    out_times[rec] = t0 + (step + 1) * dt
                    for i in range(dim):
                        out_amps[rec, i] = psi[i]
                    rec += 1
    return rec
