"""Bracketed root finding and the five regime-specific radius solvers.

The transcendental solvers share one safeguarded routine: bisection with a
secant (Newton-type) acceleration step that is accepted only while it stays
inside the current bracket.  Each solver states its defining equation in
the docstring and records the substitute-back residual in the returned
:class:`~wellblock.core.RadiusSolution`.

Every solver is deterministic: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .analytic import BdModeRadial, bd_eigenpair_radial
from .core import (FluidRockParams, GridSpec, RadialAnnulus, RadiusSolution,
                   Regime, Slab1D, SolveMethod, ValidatedProblem)
from .errors import DomainError, MaxIterExceeded, NoSignChange, RootOutsidePhysicalRange

__all__ = ["RootConfig", "solve_bracketed", "r0_ss_1d", "r0_pss_1d",
           "r0_bd_1d", "r0_bd_1d_approx", "r0_pss_radial", "r0_bd_radial"]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class RootConfig:
    """Settings for one bracketed solve."""

    bracket_lo: float
    bracket_hi: float
    abs_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        v = []
        if not self.bracket_lo < self.bracket_hi:
            v.append(("bracket", f"lo={self.bracket_lo} must be < hi={self.bracket_hi}"))
        if not self.abs_tol > 0:
            v.append(("abs_tol", "must be > 0"))
        if self.max_iter <= 0:
            v.append(("max_iter", "must be >= 1"))
        if v:
            raise DomainError(v)


def solve_bracketed(f: Callable[[float], float], cfg: RootConfig) -> Tuple[float, int, SolveMethod]:
    """Find a root of ``f`` inside ``[bracket_lo, bracket_hi]``.

    Requires a sign change on the bracket.  Terminates when |f| <= abs_tol
    or the bracket width falls below abs_tol.  Returns
    ``(root, iterations, method)`` where method records whether any
    accelerated (secant/Newton) step was accepted.
    """
    lo, hi = cfg.bracket_lo, cfg.bracket_hi
    fa, fb = f(lo), f(hi)
    if fa == 0.0:
        return lo, 0, SolveMethod.NEWTON_BRACKETED
    if fb == 0.0:
        return hi, 0, SolveMethod.NEWTON_BRACKETED
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise NoSignChange(
            f"f({lo})={fa} and f({hi})={fb} have the same sign",
            scan=[(lo, fa), (hi, fb)])
    accelerated = False
    x, fx = (lo, fa) if abs(fa) < abs(fb) else (hi, fb)
    for it in range(1, cfg.max_iter + 1):
        # secant candidate from the bracket endpoints
        denom = fb - fa
        cand = lo - fa * (hi - lo) / denom if denom != 0.0 else math.nan
        width = hi - lo
        if math.isfinite(cand) and lo + 0.001 * width < cand < hi - 0.001 * width:
            x = cand
            used_secant = True
        else:
            x = 0.5 * (lo + hi)
            used_secant = False
        fx = f(x)
        if used_secant and abs(fx) < min(abs(fa), abs(fb)):
            accelerated = True
        if fx == 0.0 or abs(fx) <= cfg.abs_tol:
            method = SolveMethod.NEWTON_BRACKETED if (accelerated or fx == 0.0) else SolveMethod.BISECTION
            return x, it, method
        if math.copysign(1.0, fx) == math.copysign(1.0, fa):
            lo, fa = x, fx
        else:
            hi, fb = x, fx
        if hi - lo <= cfg.abs_tol or hi - lo <= 4.0 * _EPS * max(abs(lo), abs(hi)):
            root = lo if abs(fa) <= abs(fb) else hi
            method = SolveMethod.NEWTON_BRACKETED if accelerated else SolveMethod.BISECTION
            return root, it, method
    raise MaxIterExceeded(
        f"no convergence in {cfg.max_iter} iterations; best bracket [{lo}, {hi}]",
        bracket=(lo, hi), f_values=(fa, fb), iterations=cfg.max_iter)


def _scan_bracket(f, lo, hi, n=64):
    """Geometric scan for a sign change; returns (a, b) or raises NoSignChange."""
    ratio = (hi / lo) ** (1.0 / n) if lo > 0 else None
    xs = [lo * ratio**i for i in range(n + 1)] if ratio else \
         [lo + (hi - lo) * i / n for i in range(n + 1)]
    trace = []
    prev_x, prev_f = xs[0], f(xs[0])
    trace.append((prev_x, prev_f))
    for x in xs[1:]:
        fx = f(x)
        trace.append((x, fx))
        if math.copysign(1.0, fx) != math.copysign(1.0, prev_f) or fx == 0.0:
            return prev_x, x
        prev_x, prev_f = x, fx
    raise NoSignChange(
        f"no sign change on [{lo}, {hi}] after {n}-point scan", scan=trace)


# ---------------------------------------------------------------------------
# regime solvers
# ---------------------------------------------------------------------------

def r0_ss_1d(grid: GridSpec, geometry: Optional[Slab1D] = None) -> RadiusSolution:
    """Steady-state 1-D radius: R0 = delta/2, independent of K, q and r_e."""
    geom = geometry if geometry is not None else Slab1D(r_e=grid.n * grid.delta)
    r0 = 0.5 * grid.delta
    return RadiusSolution(regime=Regime.STEADY_STATE, geometry=geom,
                          delta=grid.delta, r0=r0, residual=0.0,
                          iterations=0, method=SolveMethod.CLOSED_FORM, tol=0.0)


def r0_pss_1d(grid: GridSpec, geometry: Slab1D, c3: float = 0.0) -> RadiusSolution:
    """Pseudo-steady-state 1-D radius.

    Positive root of  R0^2 + 2 r_e R0 - (r_e delta + (1 + c3) delta^2) = 0,
    i.e.  R0 = -r_e + sqrt(r_e^2 + r_e delta + (1 + c3) delta^2).
    ``c3`` is the compressibility constant of the general form; the default
    0 follows the simplified equation.  The residual recorded is the
    quadratic evaluated at the root.
    """
    d, re_ = grid.delta, geometry.r_e
    rhs = re_ * d + (1.0 + c3) * d * d
    # conjugate form of -r_e + sqrt(r_e^2 + rhs): no cancellation at large r_e
    r0 = rhs / (re_ + math.sqrt(re_ * re_ + rhs))
    residual = r0 * r0 + 2.0 * re_ * r0 - rhs
    # closed form: residual is rounding noise of the dominant O(r_e*R0) terms
    tol = 64.0 * _EPS * max(2.0 * re_ * r0, rhs, 1.0)
    return RadiusSolution(regime=Regime.PSEUDO_STEADY_STATE, geometry=geometry,
                          delta=d, r0=r0, residual=residual,
                          iterations=0, method=SolveMethod.CLOSED_FORM, tol=tol)


def r0_bd_1d_approx(params: FluidRockParams, grid: GridSpec, geometry: Slab1D) -> float:
    """Closed-form approximation R0 ~ (delta/2) / (1 + (delta/(8K)) pi^2/r_e^2)."""
    d, re_ = grid.delta, geometry.r_e
    return (0.5 * d) / (1.0 + d * math.pi**2 / (8.0 * params.conductivity * re_**2))


def bd_1d_equation(params: FluidRockParams, grid: GridSpec, geometry: Slab1D,
                   tau: float) -> Callable[[float], float]:
    """Residual of the 1-D boundary-dominated radius equation.

    sin(lam R0) - sin(lam delta) + lam delta/2
        = sin(lam R0) * (C0 delta^2 / (2K)) * (e^{-K lam^2 tau / C0} - 1)/tau,

    with lam = pi/(2 r_e).  The storage factor carries C0*delta^2 and the
    decay exponent K*lam^2/C0 of the underlying mode, so that the analytic
    samples satisfy the material balance identically at the root for any
    parameters; at the normalisation K = C0 = delta = 1 it reduces to the
    bare transcendental form.
    """
    k, c0 = params.conductivity, params.storage
    d, re_ = grid.delta, geometry.r_e
    lam = math.pi / (2.0 * re_)
    efac = math.expm1(-k * lam * lam * tau / c0) / tau
    coeff = c0 * d * d / (2.0 * k) * efac

    def f(r0: float) -> float:
        s = math.sin(lam * r0)
        return s - math.sin(lam * d) + 0.5 * lam * d - s * coeff

    return f


def r0_bd_1d(params: FluidRockParams, grid: GridSpec, geometry: Slab1D,
             tau: Optional[float] = None, abs_tol: float = 1e-13) -> RadiusSolution:
    """Boundary-dominated 1-D radius: bracketed solve of :func:`bd_1d_equation`.

    The root lies in (0, delta); a sign change is required there (regimes
    where the sufficiency condition fails raise NoSignChange; they are
    reported, not patched).
    """
    tau = grid.tau if tau is None else tau
    d = grid.delta
    f = bd_1d_equation(params, grid, geometry, tau)
    lo, hi = 1e-12 * d, d
    if math.copysign(1.0, f(lo)) == math.copysign(1.0, f(hi)):
        lo, hi = _scan_bracket(f, lo, hi)
    root, iters, method = solve_bracketed(f, RootConfig(lo, hi, abs_tol=abs_tol))
    return RadiusSolution(regime=Regime.BOUNDARY_DOMINATED, geometry=geometry,
                          delta=d, r0=root, residual=f(root),
                          iterations=iters, method=method, tol=abs_tol)


def pss_radial_equation(grid: GridSpec, geometry: RadialAnnulus) -> Callable[[float], float]:
    """Residual of  -pi + R0^2/r_e^2 + pi r_w^2/r_e^2 + 2 ln(delta/R0) = 0."""
    d = grid.delta
    re2 = geometry.r_e**2
    const = -math.pi + math.pi * geometry.r_w**2 / re2

    def g(r0: float) -> float:
        return const + r0 * r0 / re2 + 2.0 * math.log(d / r0)

    return g


def r0_pss_radial(grid: GridSpec, geometry: RadialAnnulus,
                  abs_tol: float = 1e-13) -> RadiusSolution:
    """Pseudo-steady-state radial radius from the exact transcendental equation.

    Bracketed Newton/secant on (delta e^{-pi/2}/2, delta); falls back to a
    geometric scan before declaring NoSignChange.  Raises
    RootOutsidePhysicalRange if the root lands at or below r_w.
    """
    d = grid.delta
    g = pss_radial_equation(grid, geometry)
    lo, hi = 0.5 * d * math.exp(-0.5 * math.pi), d * (1.0 - 1e-12)
    if math.copysign(1.0, g(lo)) == math.copysign(1.0, g(hi)):
        lo, hi = _scan_bracket(g, 1e-8 * d, hi)
    root, iters, method = solve_bracketed(g, RootConfig(lo, hi, abs_tol=abs_tol))
    if root <= geometry.r_w:
        raise RootOutsidePhysicalRange(
            f"solved radius {root} does not exceed the well radius {geometry.r_w}",
            root=root, valid_range=(geometry.r_w, geometry.r_e))
    return RadiusSolution(regime=Regime.PSEUDO_STEADY_STATE, geometry=geometry,
                          delta=d, r0=root, residual=g(root),
                          iterations=iters, method=method, tol=abs_tol)


def bd_radial_equation(params: FluidRockParams, grid: GridSpec, mode: BdModeRadial,
                       tau: float) -> Callable[[float], float]:
    """Residual of the 2-D boundary-dominated radius equation.

    Substituting the decaying-mode samples p0 = u0(R0, s), p1 = u0(delta, s)
    and the exact well flux q(s) = -4 K e^{-lam K s / C0} (the Wronskian of
    the cross-product eigenfunction makes the flux integral exact) into the
    isotropic material balance and cancelling the common exponential gives

        phi0(R0) - phi0(delta) + 1
            + (C0 delta^2 / (4K)) phi0(R0) (e^{-lam K tau / C0} - 1)/tau = 0.

    The raw unnormalised phi0 is essential here: the constant term "+1" is
    q/(4K) with the exact flux of that normalisation.
    """
    k, c0 = params.conductivity, params.storage
    d = grid.delta
    efac = math.expm1(-mode.lambda0 * k * tau / c0) / tau
    coeff = c0 * d * d / (4.0 * k) * efac
    phi_delta = mode.eval_phi0_unchecked(d)

    def g(r0: float) -> float:
        phi = mode.eval_phi0_unchecked(r0)
        return phi - phi_delta + 1.0 + coeff * phi

    return g


def r0_bd_radial(params: FluidRockParams, grid: GridSpec, geometry: RadialAnnulus,
                 mode: Optional[BdModeRadial] = None, tau: Optional[float] = None,
                 abs_tol: float = 1e-11, scan_points: int = 2048) -> RadiusSolution:
    """Boundary-dominated radial radius on (r_w, delta).

    Root existence is not guaranteed; when the dense scan over (r_w, delta)
    finds no sign change the solver raises NoSignChange carrying the scan
    trace instead of failing silently.
    """
    if mode is None:
        mode = bd_eigenpair_radial(geometry)
    tau = grid.tau if tau is None else tau
    d = grid.delta
    g = bd_radial_equation(params, grid, mode, tau)
    rw = geometry.r_w
    lo, hi = rw * (1.0 + 1e-9), d * (1.0 - 1e-12)
    trace = []
    prev_x = lo
    prev_g = g(lo)
    trace.append((prev_x, prev_g))
    bracket = None
    for i in range(1, scan_points + 1):
        x = lo + (hi - lo) * i / scan_points
        gx = g(x)
        trace.append((x, gx))
        if math.copysign(1.0, gx) != math.copysign(1.0, prev_g) or gx == 0.0:
            bracket = (prev_x, x)
            break
        prev_x, prev_g = x, gx
    if bracket is None:
        raise NoSignChange(
            f"no sign change of the BD radial equation on ({rw}, {d}); "
            "root existence is not guaranteed for this geometry", scan=trace)
    root, iters, method = solve_bracketed(g, RootConfig(*bracket, abs_tol=abs_tol))
    return RadiusSolution(regime=Regime.BOUNDARY_DOMINATED, geometry=geometry,
                          delta=d, r0=root, residual=g(root),
                          iterations=iters, method=method, tol=abs_tol)


def solve_radius(problem: ValidatedProblem, regime: Regime,
                 tau: Optional[float] = None) -> RadiusSolution:
    """Dispatch to the regime/geometry-specific solver."""
    geom, grid, params = problem.geometry, problem.grid, problem.params
    if isinstance(geom, Slab1D):
        if regime is Regime.STEADY_STATE:
            return r0_ss_1d(grid, geom)
        if regime is Regime.PSEUDO_STEADY_STATE:
            return r0_pss_1d(grid, geom)
        return r0_bd_1d(params, grid, geom, tau=tau)
    if regime is Regime.PSEUDO_STEADY_STATE:
        return r0_pss_radial(grid, geom)
    if regime is Regime.BOUNDARY_DOMINATED:
        return r0_bd_radial(params, grid, geom, tau=tau)
    raise DomainError(("regime", "steady-state solver is defined for the slab geometry only"))
