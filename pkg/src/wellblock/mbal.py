"""Material-balance residuals and regime-constraint checks.

The residual of one MB instance (p0(s), p1(s), p0(s+tau), q, tau), scaled
to pressure * conductivity units:

* 1-D symmetric gallery (stencil factor 2)::

      r = 2 K (p0 - p1) - q delta - C0 delta^2 (p0(s+tau) - p0(s)) / tau

* 2-D isotropic five-point block (stencil factor 4)::

      r = 4 K (p0 - p1) - q + C0 delta^2 (p0(s+tau) - p0(s)) / tau

``q`` is source-positive throughout (see :mod:`wellblock.core`).  The two
forms are the two printed master balances of the underlying algebraic
system; note the storage term enters with opposite signs in the 1-D and
2-D reductions.  Zero residual means the sample satisfies the balance.

The per-regime builders map each analytic solution onto MB samples,
including the regime's orientation of the rate slot:

========================  =========================  =======================
regime / geometry         q slot (source-positive)   drift slot
========================  =========================  =======================
steady slab               +q  (gallery source)       0
pseudo-steady slab        -q  (well drains)          -q tau / (C0 r_e)
boundary-dominated slab   -K lam e^{-decay s}        mode decay over tau
pseudo-steady annulus     -q  (well drains)          -q tau / (C0 h |U|)
boundary-dominated ann.   -4K e^{-lam K s / C0}      mode decay over tau
========================  =========================  =======================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .analytic import (BdMode1D, BdModeRadial, PssProfile1D, PssProfileRadial,
                       SsProfile1D)
from .core import (FluidRockParams, Geometry, MBCoefficients, MBSample,
                   RadialAnnulus, Regime, Slab1D)
from .errors import DivisionByNearZero, DomainError, InsufficientSamples

__all__ = ["ConstraintCheck", "RegimeCheckReport", "mb_residual",
           "build_ss_samples_1d", "build_pss_samples_1d", "build_bd_samples_1d",
           "build_pss_samples_radial", "build_bd_samples_radial",
           "check_pss_constraints", "check_bd_constraints",
           "mb_residual_directional", "aniso_residuals", "reduce_symmetric"]

_NEAR_ZERO = 1e-300


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class RegimeCheckReport:
    regime: Regime
    checks: Tuple[ConstraintCheck, ...]
    overall: bool
    constants: dict

    def __post_init__(self):
        assert self.overall == all(c.passed for c in self.checks)


def mb_residual(sample: MBSample, coeffs: MBCoefficients, delta: float) -> float:
    """Residual of the algebraic MB equation (see module docstring)."""
    if coeffs.stencil_factor not in (2, 4):
        raise DomainError(("stencil_factor", "must be 2 or 4"))
    d2 = delta * delta
    flux = d2 * coeffs.j_coeff * (sample.p0_s - sample.p1_s)
    rate = d2 * coeffs.i_coeff * sample.q
    storage = coeffs.l_coeff * d2 * (sample.p0_s_tau - sample.p0_s) / sample.tau
    if coeffs.stencil_factor == 2:
        return flux - rate - storage
    return flux - rate + storage


# ---------------------------------------------------------------------------
# analytic sample builders
# ---------------------------------------------------------------------------

def build_ss_samples_1d(profile: SsProfile1D, r0: float, delta: float,
                        times: Sequence[float], tau: float) -> Tuple[MBSample, ...]:
    """Steady samples: time-independent pressures, gallery source +q."""
    p0 = profile.pressure(r0)
    p1 = profile.pressure(delta)
    return tuple(MBSample(p0_s=p0, p1_s=p1, p0_s_tau=p0, q=profile.rate, tau=tau)
                 for _ in times)


def build_pss_samples_1d(profile: PssProfile1D, r0: float, delta: float,
                         times: Sequence[float], tau: float) -> Tuple[MBSample, ...]:
    """Pseudo-steady slab samples; the draining well enters as -q."""
    return tuple(
        MBSample(p0_s=profile.pressure(r0, s),
                 p1_s=profile.pressure(delta, s),
                 p0_s_tau=profile.pressure(r0, s + tau),
                 q=-profile.rate, tau=tau)
        for s in times)


def build_bd_samples_1d(mode: BdMode1D, r0: float, delta: float,
                        times: Sequence[float], tau: float) -> Tuple[MBSample, ...]:
    """Boundary-dominated slab samples; the well rate is a sink."""
    return tuple(
        MBSample(p0_s=mode.eval(r0, s),
                 p1_s=mode.eval(delta, s),
                 p0_s_tau=mode.eval(r0, s + tau),
                 q=-mode.well_rate(s), tau=tau)
        for s in times)


def build_pss_samples_radial(profile: PssProfileRadial, r0: float, delta: float,
                             times: Sequence[float], tau: float) -> Tuple[MBSample, ...]:
    return tuple(
        MBSample(p0_s=profile.pressure(r0, s),
                 p1_s=profile.pressure(delta, s),
                 p0_s_tau=profile.pressure(r0, s + tau),
                 q=-profile.rate, tau=tau)
        for s in times)


def build_bd_samples_radial(mode: BdModeRadial, params: FluidRockParams,
                            r0: float, delta: float, times: Sequence[float],
                            tau: float) -> Tuple[MBSample, ...]:
    k, c0, h = params.conductivity, params.storage, params.thickness
    return tuple(
        MBSample(p0_s=mode.eval(r0, s, k, c0),
                 p1_s=mode.eval(delta, s, k, c0),
                 p0_s_tau=mode.eval(r0, s + tau, k, c0),
                 q=-mode.well_rate(s, k, c0, h), tau=tau)
        for s in times)


# ---------------------------------------------------------------------------
# regime constraint checks
# ---------------------------------------------------------------------------

def _spread(values) -> float:
    """Max relative deviation from the first value."""
    ref = values[0]
    scale = max(abs(ref), 1e-30)
    return max(abs(v - ref) for v in values) / scale


def check_pss_constraints(samples: Sequence[MBSample], params: FluidRockParams,
                          geometry: Geometry, rel_tol: float = 1e-8) -> RegimeCheckReport:
    """Check the pseudo-steady constraints on an ordered sample list.

    (a) the rate is the same in every sample; (b) the per-step pressure
    change is the same in every sample and its magnitude equals
    |q| tau / (C0 V); (c) the pressure difference p0 - p1 is the same in
    every sample.  Samples must share one time step.
    """
    if len(samples) < 3:
        raise InsufficientSamples(f"need >= 3 samples, got {len(samples)}")
    taus = [s.tau for s in samples]
    if _spread(taus) > 1e-12:
        raise DomainError(("tau", "samples must share a uniform time step"))
    tau = taus[0]
    if isinstance(geometry, Slab1D):
        volume = geometry.r_e
    elif isinstance(geometry, RadialAnnulus):
        volume = geometry.area * params.thickness
    else:
        raise DomainError(("geometry", f"unsupported {type(geometry).__name__}"))

    qs = [s.q for s in samples]
    drifts = [s.p0_s_tau - s.p0_s for s in samples]
    gaps = [s.p0_s - s.p1_s for s in samples]
    expected_drift = abs(qs[0]) * tau / (params.storage * volume)

    checks = (
        ConstraintCheck("rate constant in s", _spread(qs), 0.0, rel_tol,
                        _spread(qs) <= rel_tol),
        ConstraintCheck("pressure step constant in s", _spread(drifts), 0.0, rel_tol,
                        _spread(drifts) <= rel_tol),
        ConstraintCheck("pressure step magnitude = |q| tau/(C0 V)",
                        abs(drifts[0]), expected_drift, rel_tol,
                        abs(abs(drifts[0]) - expected_drift)
                        <= rel_tol * max(expected_drift, 1e-30)),
        ConstraintCheck("p0 - p1 constant in s", _spread(gaps), 0.0, rel_tol,
                        _spread(gaps) <= rel_tol),
    )
    overall = all(c.passed for c in checks)
    return RegimeCheckReport(Regime.PSEUDO_STEADY_STATE, checks, overall,
                             constants={"drift_per_step": drifts[0],
                                        "pressure_gap": gaps[0]})


def check_bd_constraints(samples: Sequence[MBSample], tau: float,
                         rel_tol: float = 1e-8) -> RegimeCheckReport:
    """Check the boundary-dominated ratio constraints.

    q(s)/p1(s) and p0(s)/p1(s) must be constant in s, and the normalised
    per-step ratio (p0(s+tau)/p0(s) - 1)/tau must be constant in s (and
    stable under tau refinement: samples taken at different tau report the
    same constant).  Reports the measured constants C1, C2, C3.
    """
    if len(samples) < 3:
        raise InsufficientSamples(f"need >= 3 samples, got {len(samples)}")
    for s in samples:
        if abs(s.p0_s) < _NEAR_ZERO or abs(s.p1_s) < _NEAR_ZERO:
            raise DivisionByNearZero("sample pressure magnitude below 1e-300")
    c1s = [s.q / s.p1_s for s in samples]
    c2s = [s.p0_s / s.p1_s for s in samples]
    c3s = [(s.p0_s_tau / s.p0_s - 1.0) / s.tau for s in samples]
    checks = (
        ConstraintCheck("q/p1 constant in s", _spread(c1s), 0.0, rel_tol,
                        _spread(c1s) <= rel_tol),
        ConstraintCheck("p0/p1 constant in s", _spread(c2s), 0.0, rel_tol,
                        _spread(c2s) <= rel_tol),
        ConstraintCheck("(p0(s+tau)/p0(s) - 1)/tau constant", _spread(c3s), 0.0, rel_tol,
                        _spread(c3s) <= rel_tol),
    )
    overall = all(c.passed for c in checks)
    return RegimeCheckReport(Regime.BOUNDARY_DOMINATED, checks, overall,
                             constants={"C1": c1s[0], "C2": c2s[0], "C3": c3s[0]})


# ---------------------------------------------------------------------------
# unreduced anisotropic system (kept for testing the symmetry reduction)
# ---------------------------------------------------------------------------

def mb_residual_directional(p_well: float, p_nbr: float, p_well_next: float,
                            k: float, q: float, storage_coeff: float,
                            tau: float) -> float:
    """One directional balance: tau k (p_well - p_nbr) - tau q - Q (p+ - p)."""
    return tau * k * (p_well - p_nbr) - tau * q - storage_coeff * (p_well_next - p_well)


def aniso_residuals(p_well, p_nbr, p_well_next, k, q, storage_coeff, tau):
    """The four directional balances (x-, x+, y-, y+), unreduced.

    Each argument is a 4-sequence ordered (x-, x+, y-, y+).
    """
    return tuple(
        mb_residual_directional(p_well[i], p_nbr[i], p_well_next[i],
                                k[i], q[i], storage_coeff[i], tau)
        for i in range(4))


def reduce_symmetric(p_well, p_nbr, p_well_next, k, q, storage_coeff, tau):
    """Collapse the four balances under the +/- symmetry to the (x, y) pair.

    With K_x- = K_x+, q_x- = q_x+ = q_x/2, Q_x- = Q_x+ = Q_x/2 and equal
    well/neighbour pressures per axis, the sum over each axis gives
    tau 2 K_x (p - p1) = tau q_x + 2 Q_x (p+ - p); returned as residuals.
    """
    out = []
    for ax in (0, 1):
        i, j = 2 * ax, 2 * ax + 1
        kx = k[i]
        qx = q[i] + q[j]
        big_qx = storage_coeff[i] + storage_coeff[j]
        out.append(tau * 2.0 * kx * (p_well[i] - p_nbr[i]) - tau * qx
                   - big_qx * (p_well_next[i] - p_well[i]))
    return tuple(out)
