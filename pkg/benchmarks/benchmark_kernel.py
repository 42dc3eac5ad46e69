"""Compare the compiled RK4 kernel against the numpy/scipy fallback.

Runs shortened versions of the two- and three-waveguide scenarios under both
backends with identical steps, reporting wall time, speedup, and the largest
amplitude deviation between the two results.

    python benchmarks/benchmark_kernel.py [--full]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from zenophot import available_backends
from zenophot.evolve import IntegratorConfig, StateVector, default_dt, evolve
from zenophot.hamiltonian import RampSchedule, SystemSpec, build_blocks
from zenophot.basis import Diamond, enumerate_sector


def make_case(n_waveguides: int, plateau: float):
    absorbers = {0: Diamond(), n_waveguides - 1: Diamond()}
    spec = SystemSpec(n_waveguides=n_waveguides, absorbers=absorbers,
                      ramp=RampSchedule.from_plateau(plateau))
    charge = n_waveguides  # one photon per waveguide
    space = enumerate_sector(spec, charge)
    blocks = build_blocks(spec, space)
    psi0 = np.zeros(space.dim, dtype=complex)
    label = {2: "R.L|G.G", 3: "R.L.R|G.G"}[n_waveguides]
    psi0[space.index_of_label(label)] = 1.0
    return spec, space, blocks, StateVector(psi0)


def time_backend(backend: str, case, repeats: int = 1) -> tuple[float, np.ndarray]:
    spec, space, blocks, psi0 = case
    cfg = IntegratorConfig(stride=1000)
    best = float("inf")
    series = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        series = evolve(spec, blocks, space, psi0.copy(), cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, series.amplitudes[-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true",
                        help="use production-length plateaus (slow with the fallback)")
    args = parser.parse_args()

    backends = available_backends()
    if backends == ("python",):
        print("compiled kernel not built; only the python backend is available")

    plateau2 = 6760.0 if args.full else 800.0
    plateau3 = 22000.0 if args.full else 600.0
    cases = [
        ("two waveguides, diamond absorbers", make_case(2, plateau2)),
        ("three waveguides, end absorbers", make_case(3, plateau3)),
    ]

    for label, case in cases:
        dim = case[1].dim
        steps = int(np.ceil(case[0].ramp.total_duration / default_dt(case[0], case[2])))
        print(f"\n{label}: dim={dim}, ~{steps} steps")
        results = {}
        for backend in backends:
            wall, final = time_backend(backend, case)
            results[backend] = (wall, final)
            print(f"  {backend:9s} {wall:8.3f} s")
        if len(results) == 2:
            (wc, fc), (wp, fp) = results["compiled"], results["python"]
            dev = float(np.abs(fc - fp).max())
            print(f"  speedup   {wp / wc:8.1f} x    max |amp diff| = {dev:.2e}")


if __name__ == "__main__":
    main()
