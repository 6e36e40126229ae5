"""Closed-form solutions of the underlying boundary-value problems.

1-D slab: steady linear profile, pseudo-steady quadratic profile with a
uniform pressure drift, and the first decaying sine mode of the
boundary-dominated problem.  2-D annulus: the pseudo-steady radial profile
driven by the divergence-constant velocity field, and the first eigenpair
of the mixed Dirichlet/Neumann Helmholtz problem.

Sign notes (see :mod:`wellblock.core` for the package-wide conventions):
the profile constants are exactly the textbook values of each printed
boundary-value problem.  The pseudo-steady drifts are written for a
draining well (pressure declines at rate q/(C0 V)); the radial profile w
is increasing away from the well and vanishes at r_w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import FluidRockParams, RadialAnnulus, Slab1D
from .errors import DomainError, EigenBracketError
from .specfun import bessel_j0, bessel_j1, bessel_y0, bessel_y1

__all__ = ["SsProfile1D", "PssProfile1D", "BdMode1D", "PssProfileRadial",
           "BdModeRadial", "ss_profile_1d", "pss_profile_1d", "bd_mode_1d",
           "pss_profile_radial", "bd_eigenpair_radial", "eval_phi0"]


# ---------------------------------------------------------------------------
# 1-D slab
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SsProfile1D:
    """Steady profile p(x) = A x + B with A = -q/K, B = p_e + (q/K) r_e."""

    slope: float
    intercept: float
    boundary_pressure: float
    rate: float

    def pressure(self, x: float) -> float:
        return self.slope * x + self.intercept


def ss_profile_1d(params: FluidRockParams, geometry: Slab1D, q: float,
                  p_e: float) -> SsProfile1D:
    """Steady 1-D profile for a gallery of strength q at x = 0.

    Satisfies p(r_e) = p_e and -K p'(0) = q algebraically.
    """
    k = params.conductivity
    a = -q / k
    b = p_e + (q / k) * geometry.r_e
    return SsProfile1D(slope=a, intercept=b, boundary_pressure=p_e, rate=q)


@dataclass(frozen=True)
class PssProfile1D:
    """Pseudo-steady 1-D solution p(x, t) = w(x) + drift * t.

    w(x) = quad x^2 + lin x with quad = -q/(2 K r_e) and lin = q/K, so
    w(0) = 0, w'(r_e) = 0 and K w'' = drift = -q/(C0 r_e): the profile keeps
    its shape while pressure declines uniformly as the gallery drains.
    """

    quad: float
    lin: float
    drift: float
    rate: float

    def shape(self, x: float) -> float:
        return (self.quad * x + self.lin) * x

    def pressure(self, x: float, t: float) -> float:
        return self.shape(x) + self.drift * t


def pss_profile_1d(params: FluidRockParams, geometry: Slab1D, q: float) -> PssProfile1D:
    a = -q / (2.0 * params.conductivity * geometry.r_e)
    b = q / params.conductivity
    drift = -q / (params.storage * geometry.r_e)
    return PssProfile1D(quad=a, lin=b, drift=drift, rate=q)


@dataclass(frozen=True)
class BdMode1D:
    """First boundary-dominated slab mode u0(x, t) = e^{-decay t} sin(lam x).

    lam = pi/(2 r_e); the mode vanishes at the well face x = 0 and has zero
    slope at x = r_e.  decay = K lam^2 / C0 (the sine's Laplacian eigenvalue
    is lam^2).  The well rate magnitude is K lam e^{-decay s},
    production-positive; in the source-positive MB slot it enters with a
    minus sign (the well drains).
    """

    lam: float
    decay_rate: float
    conductivity: float

    def eval(self, x: float, t: float) -> float:
        return math.exp(-self.decay_rate * t) * math.sin(self.lam * x)

    def well_rate(self, t: float) -> float:
        """Production-positive rate K lam e^{-decay t}."""
        return self.conductivity * self.lam * math.exp(-self.decay_rate * t)


def bd_mode_1d(params: FluidRockParams, geometry: Slab1D) -> BdMode1D:
    lam = math.pi / (2.0 * geometry.r_e)
    decay = params.conductivity * lam * lam / params.storage
    return BdMode1D(lam=lam, decay_rate=decay, conductivity=params.conductivity)


# ---------------------------------------------------------------------------
# 2-D annulus, pseudo-steady
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PssProfileRadial:
    """Pseudo-steady radial solution p(r, t) = w(r) + drift * t.

    The divergence-constant velocity field has the radial speed profile
    v(r) = -(C/2) r + C1/r with C = q/|U| and C1 = C r_e^2 / 2, so that
    v(r_e) = 0 and the flux through any circle of radius r is
    2 pi r v(r) = q (r_e^2 - r^2)/(r_e^2 - r_w^2).  The pressure shape

        w(r) = (1/K) [ -(C/4) r^2 + C1 ln r + C2 ],

    with C2 fixed by w(r_w) = 0, increases away from the well; the drift is
    -q/(C0 |U|) (uniform decline while the well produces q).
    """

    c: float
    c1: float
    c2: float
    area: float
    drift: float
    rate: float
    conductivity: float
    geometry: RadialAnnulus

    def v(self, r: float) -> float:
        return -0.5 * self.c * r + self.c1 / r

    def shape(self, r: float) -> float:
        return (-0.25 * self.c * r * r + self.c1 * math.log(r) + self.c2) / self.conductivity

    def pressure(self, r: float, t: float) -> float:
        return self.shape(r) + self.drift * t


def pss_profile_radial(params: FluidRockParams, geometry: RadialAnnulus,
                       q: float) -> PssProfileRadial:
    area = geometry.area
    c = q / (params.thickness * area)  # source density of the per-thickness rate
    c1 = 0.5 * c * geometry.r_e**2
    c2 = 0.25 * c * geometry.r_w**2 - c1 * math.log(geometry.r_w)
    drift = -q / (params.storage * params.thickness * area)
    return PssProfileRadial(c=c, c1=c1, c2=c2, area=area, drift=drift, rate=q,
                            conductivity=params.conductivity, geometry=geometry)


# ---------------------------------------------------------------------------
# 2-D annulus, boundary-dominated eigenpair
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BdModeRadial:
    """First eigenpair of the annulus Helmholtz problem.

    phi0(r) = a Y0(sqrt(lam0) r) - b J0(sqrt(lam0) r) with a = J0(sqrt(lam0) r_w)
    and b = Y0(sqrt(lam0) r_w), so phi0(r_w) = 0; lam0 is the smallest positive
    root of the cross-product determinant, which enforces phi0'(r_e) = 0.
    phi0 is kept unnormalised: with this normalisation the well flux integral
    is exactly 4K e^{-lam0 K t / C0} by the Bessel Wronskian.
    """

    lambda0: float
    a: float
    b: float
    geometry: RadialAnnulus
    determinant_residual: float

    def eval_phi0_unchecked(self, r: float) -> float:
        s = math.sqrt(self.lambda0)
        return self.a * bessel_y0(s * r) - self.b * bessel_j0(s * r)

    def eval_phi0_prime(self, r: float) -> float:
        s = math.sqrt(self.lambda0)
        return s * (-self.a * bessel_y1(s * r) + self.b * bessel_j1(s * r))

    def eval(self, r: float, t: float, conductivity: float = 1.0,
             storage: float = 1.0) -> float:
        """u0(r, t) = e^{-lam0 K t / C0} phi0(r)."""
        return math.exp(-self.lambda0 * conductivity * t / storage) * self.eval_phi0_unchecked(r)

    def well_rate(self, t: float, conductivity: float = 1.0,
                  storage: float = 1.0, thickness: float = 1.0) -> float:
        """Production-positive well rate: the flux integral over the well circle.

        -2 pi r_w K h d(u0)/dr at r_w equals -4Kh e^{-lam0 K t/C0} exactly
        (the cross-product Wronskian gives phi0'(r_w) = 2/(pi r_w)); reported
        production-positive.
        """
        return 4.0 * conductivity * thickness \
            * math.exp(-self.lambda0 * conductivity * t / storage)


def _eigen_determinant(geometry: RadialAnnulus):
    rw, re_ = geometry.r_w, geometry.r_e

    def f_of_u(u: float) -> float:
        # u = sqrt(lambda); F = Y0(u rw) J0'(u re) - Y0'(u re) J0(u rw)
        return bessel_j0(u * rw) * bessel_y1(u * re_) - bessel_y0(u * rw) * bessel_j1(u * re_)

    return f_of_u


def bd_eigenpair_radial(geometry: RadialAnnulus, abs_tol: float = 1e-13) -> BdModeRadial:
    """Smallest eigenvalue and sign-definite eigenfunction of the annulus problem.

    Scans F(sqrt(lam)) upward from 0 for the first sign change, then refines
    by the safeguarded bracketed solver.  The scan reaches at least
    sqrt(lam_max) r_e = 40 and always resolves the mode spacing of the
    annulus width; EigenBracketError reports the trace when nothing is found.
    """
    from .solvers import RootConfig, solve_bracketed

    rw, re_ = geometry.r_w, geometry.r_e
    f = _eigen_determinant(geometry)
    u_max = max(40.0 / re_, 4.0 * math.pi / (re_ - rw))
    du = (math.pi / (re_ - rw)) / 40.0
    u_prev = du * 1e-6
    f_prev = f(u_prev)
    trace = [(u_prev, f_prev)]
    bracket = None
    u = du
    while u <= u_max:
        fu = f(u)
        trace.append((u, fu))
        if math.copysign(1.0, fu) != math.copysign(1.0, f_prev) or fu == 0.0:
            bracket = (u_prev, u)
            break
        u_prev, f_prev = u, fu
        u += du
    if bracket is None:
        raise EigenBracketError(
            f"no sign change of the eigenvalue determinant for sqrt(lam) in "
            f"(0, {u_max}] (geometry r_w={rw}, r_e={re_})", scan=trace)
    u0, _, _ = solve_bracketed(f, RootConfig(*bracket, abs_tol=abs_tol))
    lam0 = u0 * u0
    a = bessel_j0(u0 * rw)
    b = bessel_y0(u0 * rw)
    return BdModeRadial(lambda0=lam0, a=a, b=b, geometry=geometry,
                        determinant_residual=f(u0))


def eval_phi0(mode: BdModeRadial, r: float) -> float:
    """phi0(r) on [r_w, r_e]; DomainError outside the annulus."""
    g = mode.geometry
    if not g.r_w * (1.0 - 1e-12) <= r <= g.r_e * (1.0 + 1e-12):
        raise DomainError(("r", f"must lie in [{g.r_w}, {g.r_e}], got {r}"))
    return mode.eval_phi0_unchecked(r)
