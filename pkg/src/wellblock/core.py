"""Domain types, units and sign conventions shared by all other modules.

Sign conventions (stated once, used everywhere):

* The material-balance (MB) rate ``q`` is *source-positive*: ``q > 0`` means
  fluid enters the well block, ``q < 0`` means the well block drains (a
  producing well).  The analytic profile constructors in :mod:`.analytic`
  take the rate parameter exactly as it enters each boundary-value problem;
  the MB sample builders in :mod:`.mbal` perform the per-regime mapping onto
  the source-positive MB slot and document it.
* Units are consistent/dimensionless; there is no unit-conversion layer.
  Defaults mirror the usual normalisation (h = 1, phi = 1, c_p = 1) but are
  overridable.

All types are frozen dataclasses: immutable after construction, safe to
share between concurrent tasks.  Every constructor either establishes all
of its invariants or raises :class:`~wellblock.errors.DomainError`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Union

from .errors import DomainError

__all__ = [
    "FluidRockParams",
    "Slab1D",
    "RadialAnnulus",
    "Geometry",
    "GridSpec",
    "MBSample",
    "MBCoefficients",
    "Regime",
    "SolveMethod",
    "RadiusSolution",
    "ValidatedProblem",
    "validate_problem",
]


def _require_finite(name, value, violations):
    if not math.isfinite(value):
        violations.append((name, "must be finite"))
        return False
    return True


class Regime(enum.Enum):
    """Flow regime. Exhaustive; no default."""

    STEADY_STATE = "ss"
    PSEUDO_STEADY_STATE = "pss"
    BOUNDARY_DOMINATED = "bd"


class SolveMethod(enum.Enum):
    CLOSED_FORM = "closed-form"
    BISECTION = "bisection"
    NEWTON_BRACKETED = "newton-bracketed"


@dataclass(frozen=True)
class FluidRockParams:
    """Physical coefficients entering every equation.

    conductivity is the mobility k/mu; porosity lies in (0, 1]; the
    compound storage coefficient phi * c_p is exposed as :attr:`storage`.
    ``v0_fraction`` is the block-to-domain volume fraction of the
    steady-state constraint; it defaults to 1 and is kept only for
    interpretation (no code path exercises other values).
    """

    conductivity: float = 1.0
    porosity: float = 1.0
    compressibility: float = 1.0
    thickness: float = 1.0
    v0_fraction: float = 1.0

    def __post_init__(self):
        v = []
        if _require_finite("conductivity", self.conductivity, v) and self.conductivity <= 0:
            v.append(("conductivity", "K > 0"))
        if _require_finite("porosity", self.porosity, v) and not 0 < self.porosity <= 1:
            v.append(("porosity", "phi in (0, 1]"))
        if _require_finite("compressibility", self.compressibility, v) and self.compressibility <= 0:
            v.append(("compressibility", "c_p > 0"))
        if _require_finite("thickness", self.thickness, v) and self.thickness <= 0:
            v.append(("thickness", "h > 0"))
        if v:
            raise DomainError(v)

    @property
    def storage(self) -> float:
        """Compound storage coefficient C0 = phi * c_p (exact product)."""
        return self.porosity * self.compressibility


@dataclass(frozen=True)
class Slab1D:
    """1-D slab: producing gallery plane at x = 0, exterior at x = r_e."""

    r_e: float

    def __post_init__(self):
        v = []
        if _require_finite("r_e", self.r_e, v) and self.r_e <= 0:
            v.append(("r_e", "r_e > 0"))
        if v:
            raise DomainError(v)


@dataclass(frozen=True)
class RadialAnnulus:
    """2-D annulus r_w < r < r_e between wellbore and exterior boundary."""

    r_w: float
    r_e: float

    def __post_init__(self):
        v = []
        ok_w = _require_finite("r_w", self.r_w, v)
        ok_e = _require_finite("r_e", self.r_e, v)
        if ok_w and self.r_w <= 0:
            v.append(("r_w", "r_w > 0"))
        if ok_w and ok_e and not self.r_w < self.r_e:
            v.append(("r_w<r_e", f"{self.r_w} >= {self.r_e}"))
        if v:
            raise DomainError(v)

    @property
    def area(self) -> float:
        """|U| = pi (r_e^2 - r_w^2)."""
        return math.pi * (self.r_e**2 - self.r_w**2)


Geometry = Union[Slab1D, RadialAnnulus]


@dataclass(frozen=True)
class GridSpec:
    """Coarse discretisation: block size, block count, time step."""

    delta: float
    n: int
    tau: float

    def __post_init__(self):
        v = []
        if _require_finite("delta", self.delta, v) and self.delta <= 0:
            v.append(("delta", "delta > 0"))
        if self.n <= 0:
            v.append(("n", "N >= 1"))
        if _require_finite("tau", self.tau, v) and self.tau <= 0:
            v.append(("tau", "tau > 0"))
        if v:
            raise DomainError(v)


@dataclass(frozen=True)
class MBSample:
    """One material-balance instance (p0(s), p1(s), p0(s+tau), q(s), tau).

    ``q`` is source-positive (see module docstring).
    """

    p0_s: float
    p1_s: float
    p0_s_tau: float
    q: float
    tau: float

    def __post_init__(self):
        v = []
        for name in ("p0_s", "p1_s", "p0_s_tau", "q"):
            _require_finite(name, getattr(self, name), v)
        if _require_finite("tau", self.tau, v) and self.tau <= 0:
            v.append(("tau", "tau > 0"))
        if v:
            raise DomainError(v)


@dataclass(frozen=True)
class MBCoefficients:
    """Coefficients of the algebraic MB equation.

    For the 1-D slab instantiation: j_coeff = 2K/delta^2, the rate scale
    i_coeff = 1/(h*dy*dx) with dy*h = 1, and l_coeff = phi*c_p.  The
    stencil factor is 2 for the symmetric 1-D gallery and 4 for the
    isotropic 2-D five-point block.
    """

    j_coeff: float
    i_coeff: float
    l_coeff: float
    stencil_factor: int

    def __post_init__(self):
        if self.stencil_factor not in (2, 4):
            raise DomainError(("stencil_factor", "must be 2 (1-D) or 4 (2-D)"))

    @classmethod
    def for_slab(cls, params: FluidRockParams, grid: GridSpec) -> "MBCoefficients":
        d = grid.delta
        return cls(j_coeff=2.0 * params.conductivity / d**2,
                   i_coeff=1.0 / d,  # 1/(h*dy*dx) with dy*h = 1
                   l_coeff=params.storage,
                   stencil_factor=2)

    @classmethod
    def for_radial(cls, params: FluidRockParams, grid: GridSpec) -> "MBCoefficients":
        d = grid.delta
        return cls(j_coeff=4.0 * params.conductivity / d**2,
                   i_coeff=1.0 / (d * d * params.thickness),
                   l_coeff=params.storage,
                   stencil_factor=4)


@dataclass(frozen=True)
class RadiusSolution:
    """A solved equivalent well-block radius with solver diagnostics.

    ``residual`` is the defining equation evaluated at ``r0``; ``tol`` is
    the tolerance the solver guaranteed, recorded alongside.
    """

    regime: Regime
    geometry: Geometry
    delta: float
    r0: float
    residual: float
    iterations: int
    method: SolveMethod
    tol: float

    def __post_init__(self):
        v = []
        if not math.isfinite(self.r0):
            v.append(("r0", "must be finite"))
        elif isinstance(self.geometry, Slab1D):
            if not 0.0 < self.r0 < self.delta:
                v.append(("r0", f"0 < r0 < delta violated: r0={self.r0}, delta={self.delta}"))
        else:
            if not self.geometry.r_w * (1.0 - 1e-12) <= self.r0 < self.geometry.r_e:
                v.append(("r0", f"r_w <= r0 < r_e violated: r0={self.r0}"))
        if abs(self.residual) > self.tol:
            v.append(("residual", f"|residual|={abs(self.residual)} exceeds tol={self.tol}"))
        if v:
            raise DomainError(v)


@dataclass(frozen=True)
class ValidatedProblem:
    """A (params, geometry, grid) triple whose cross invariants all hold.

    Construct through :func:`validate_problem`.
    """

    params: FluidRockParams
    geometry: Geometry
    grid: GridSpec


def validate_problem(params, geometry=None, grid=None) -> ValidatedProblem:
    """Check every cross invariant and return a validated bundle.

    All violations are collected and reported together.  Validating an
    already-validated problem returns it unchanged (idempotent).
    """
    if isinstance(params, ValidatedProblem):
        return params
    v = []
    d, n = grid.delta, grid.n
    if isinstance(geometry, Slab1D):
        if abs(n * d - geometry.r_e) > 1e-12 * max(abs(geometry.r_e), 1.0):
            v.append(("N*delta=r_e", f"{n}*{d}={n * d} != {geometry.r_e}"))
        if not d < geometry.r_e:
            v.append(("delta<r_e", f"{d} >= {geometry.r_e}"))
    elif isinstance(geometry, RadialAnnulus):
        if not d < geometry.r_e:
            v.append(("delta<r_e", f"{d} >= {geometry.r_e}"))
        if not d > geometry.r_w:
            v.append(("delta>r_w", f"{d} <= {geometry.r_w} (well block must contain the well)"))
    else:
        v.append(("geometry", f"unknown geometry {type(geometry).__name__}"))
    if v:
        raise DomainError(v)
    return ValidatedProblem(params=params, geometry=geometry, grid=grid)


def with_tau(problem: ValidatedProblem, tau: float) -> ValidatedProblem:
    """Return a copy of ``problem`` with a different grid time step."""
    return ValidatedProblem(problem.params, problem.geometry,
                            replace(problem.grid, tau=tau))
