"""Closed-form transition amplitudes and rates (the analytic short-time oracle).

These are the textbook time-dependent perturbation-theory results for the
coupled-waveguide-plus-absorber system, usable standalone as a regime
calculator and as an independent cross-check on the numerics.  Units:
hbar = 1, angular frequencies.

Conventions worth noting:

* The first-order absorption rate vanishes off resonance (the golden-rule
  delta function); on resonance it is formally divergent and raised as an
  error rather than returned.
* The second-order two-photon rate divides by the detuning squared.  The
  alternative reading where the denominator is (detuning * omega)^2 is
  selectable via ``denominator="delta_omega"`` for comparison; with the
  default omega = 1 the two coincide.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence


class ResonantCaseError(ValueError):
    """Requested a rate at zero detuning, where the closed form is singular."""


@dataclass(frozen=True)
class CouplingParams:
    """Inputs to the analytic formulas.

    theta: waveguide-waveguide coupling; lam: waveguide-absorber coupling;
    delta: detuning of the single-photon absorber levels; t: elapsed time;
    delta_omega_r: two-level absorber detuning (separate knob because the
    two-level sweep varies it while delta stays fixed).
    """

    theta: float = 1.0 / 164.0
    lam: float = 0.2
    delta: float = 1.0
    t: float = 0.0
    delta_omega_r: float = 0.0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("elapsed time must be non-negative")


def gamma1(params: CouplingParams) -> float:
    """First-order absorption rate into a detuned level: exactly zero off resonance."""
    if params.delta == 0:
        raise ResonantCaseError("first-order rate is singular at zero detuning")
    return 0.0


def gamma2(params: CouplingParams, denominator: str = "delta", omega: float = 1.0) -> float:
    """Second-order two-photon absorption rate, 8 t lam^4 / delta^2."""
    if params.delta == 0:
        raise ResonantCaseError("second-order rate is singular at zero detuning")
    if denominator == "delta":
        den = params.delta ** 2
    elif denominator == "delta_omega":
        den = (params.delta * omega) ** 2
    else:
        raise ValueError("denominator must be 'delta' or 'delta_omega'")
    return 8.0 * params.t * params.lam ** 4 / den


def nth_order_amplitude(n: int, theta: float, t: float) -> complex:
    """n-th order waveguide transition amplitude: 2^(n-1) (theta t)^n / (n! i^n)."""
    if n < 1:
        raise ValueError("order must be a positive integer")
    return (2.0 ** (n - 1)) * (theta * t) ** n / (math.factorial(n) * (1j) ** n)


def p_bunch(params: CouplingParams) -> complex:
    """First-order amplitude into either bunched configuration: -i theta t."""
    return nth_order_amplitude(1, params.theta, params.t)


def p_antibunch(params: CouplingParams) -> complex:
    """Second-order amplitude into the exchanged anti-bunched configuration: -(theta t)^2."""
    return nth_order_amplitude(2, params.theta, params.t)


def p_tpa(params: CouplingParams) -> complex:
    """Third-order amplitude for two-photon absorption into either absorber.

    3 theta lam^2 [ t^2 / (2 delta) + i t / delta^2 + (e^{-i delta t} - 1) / delta^3 ].
    The three terms cancel through second order in t, leaving a cubic onset.
    """
    if params.delta == 0:
        raise ResonantCaseError("third-order amplitude is singular at zero detuning")
    th, lm, d, t = params.theta, params.lam, params.delta, params.t
    pref = 3.0 * th * lm ** 2
    return (pref * t ** 2 / (2.0 * d)
            + 1j * pref * t / d ** 2
            + (pref / d ** 3) * (cmath.exp(-1j * d * t) - 1.0))


def transition_probabilities(params: CouplingParams) -> tuple[float, float, float]:
    """(P_bunch, P_antibunch, P_tpa): squared magnitudes of the three amplitudes."""
    return (abs(p_bunch(params)) ** 2,
            abs(p_antibunch(params)) ** 2,
            abs(p_tpa(params)) ** 2)


def two_level_probs(params: CouplingParams) -> tuple[float, float, float]:
    """Single-photon absorption vs swap probabilities for a two-level absorber.

    P_absorb = 4 lam^2 [sin(dw t / 2) / (dw / 2)]^2  (limit 4 lam^2 t^2 at dw = 0),
    P_swap   = theta^2 t^2,
    ratio    = P_absorb / P_swap, which is detuning-independent to first order.
    """
    lm, th, dw, t = params.lam, params.theta, params.delta_omega_r, params.t
    if dw == 0.0:
        p_lam = 4.0 * lm ** 2 * t ** 2
    else:
        p_lam = 4.0 * lm ** 2 * (math.sin(0.5 * dw * t) / (0.5 * dw)) ** 2
    p_th = th ** 2 * t ** 2
    if t == 0.0:
        ratio = 4.0 * lm ** 2 / th ** 2 if th != 0 else math.inf
    else:
        ratio = p_lam / p_th if p_th != 0 else math.inf
    return p_lam, p_th, ratio


def golden_rule_rates(v_fi: float, e_i: float, e_f: float,
                      paths: Sequence[tuple[float, float, float]],
                      t: float, broadening: float = 1e-6) -> tuple[float, float]:
    """Generic first- and second-order golden-rule rates.

    ``v_fi`` is the direct matrix element; ``paths`` lists second-order
    channels as (v_fm, v_mi, e_m).  The first-order delta function uses a
    rectangular broadening of width ``broadening`` so the function is total:
    the rate is reported as 0 whenever |e_f - e_i| exceeds the broadening.
    A degenerate intermediate level (e_m == e_i) is a singular case.
    """
    if abs(e_f - e_i) <= broadening:
        g1 = 2.0 * math.pi * v_fi ** 2 / (2.0 * broadening) if broadening > 0 else math.inf
    else:
        g1 = 0.0
    acc = 0.0 + 0.0j
    for v_fm, v_mi, e_m in paths:
        if e_m == e_i:
            raise ResonantCaseError("degenerate intermediate level in second-order rate")
        acc += (v_fm * v_mi) / (e_i - e_m)
    g2 = 2.0 * t * abs(acc) ** 2
    return g1, g2


def rates_report(params: CouplingParams) -> dict:
    """All analytic quantities plus regime flags, as a flat JSON-friendly dict."""
    report: dict = {
        "theta": params.theta,
        "lambda": params.lam,
        "delta": params.delta,
        "t": params.t,
        "delta_omega_r": params.delta_omega_r,
        "coupling_ratio": params.lam / params.theta if params.theta else math.inf,
        "theta_t": params.theta * params.t,
        "short_time_ok": params.theta * params.t <= 0.01,
    }
    if params.delta == 0:
        report["singular"] = True
        report["gamma1"] = None
        report["gamma2"] = None
        report["p_tpa"] = None
        report["P_TPA"] = None
    else:
        report["singular"] = False
        report["gamma1"] = gamma1(params)
        report["gamma2"] = gamma2(params)
        tpa = p_tpa(params)
        report["p_tpa"] = [tpa.real, tpa.imag]
        report["P_TPA"] = abs(tpa) ** 2
    pb = p_bunch(params)
    pab = p_antibunch(params)
    report["p_B"] = [pb.real, pb.imag]
    report["p_AB"] = [pab.real, pab.imag]
    report["P_B"] = abs(pb) ** 2
    report["P_AB"] = abs(pab) ** 2
    report["dP_B_dt"] = 2.0 * params.theta ** 2 * params.t
    p_lam, p_th, ratio = two_level_probs(params)
    report["P_lambda"] = p_lam
    report["P_theta"] = p_th
    report["absorb_swap_ratio"] = ratio
    return report
