"""Finite-difference reference simulator (1-D slab, 2-D five-point grid).

Grids are vertex-centred on the points [0, delta, 2 delta, ..., N delta]
(tensor product in 2-D), with half control volumes at the ends so the total
volume is exact.  The producing gallery of the slab problems sits at node 0
with a doubled link to node 1 (the symmetric-gallery factor 2); with that
choice the steady solve reproduces the analytic linear profile at the
nodes i >= 1 and the well-block value equals the profile at delta/2 exactly.

The simulator is sign-agnostic plumbing: ``q`` is the signed rate added to
the well node (positive = fluid enters the grid).  Boundary conditions come
as one :class:`BoundarySpec` variant per run:

* ``steady``: Dirichlet exterior pressure, gallery source;
* ``pseudo_steady``: no-flow exterior, gallery source;
* ``boundary_dominated``: Dirichlet 0 at the well node, no-flow exterior,
  no source (the ghost-value reflection at the well face is first-order).

Time stepping is backward Euler by default (unconditionally stable, needed
for the long pseudo-steady horizons); the explicit scheme is retained for
cross-validation and guards its stability bound.  The hot per-step loops
live in the compiled kernel backend (:mod:`wellblock._backend`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _backend as backend
from .core import MBSample, Slab1D, ValidatedProblem
from .errors import (DomainError, InsufficientSamples, NonFiniteDetected,
                     SingularSystem, StabilityViolation)

__all__ = ["BoundarySpec", "FdField", "FdSeries", "fd_steady_1d",
           "fd_transient", "extract_mb_samples", "series_to_csv"]

_BOUNDARY_KINDS = ("steady", "pseudo_steady", "boundary_dominated")


@dataclass(frozen=True)
class BoundarySpec:
    """Exactly one boundary variant per run."""

    kind: str
    p_e: float = 0.0

    def __post_init__(self):
        if self.kind not in _BOUNDARY_KINDS:
            raise DomainError(("kind", f"must be one of {_BOUNDARY_KINDS}"))

    @classmethod
    def steady(cls, p_e: float = 0.0) -> "BoundarySpec":
        return cls("steady", p_e)

    @classmethod
    def pseudo_steady(cls) -> "BoundarySpec":
        return cls("pseudo_steady")

    @classmethod
    def boundary_dominated(cls) -> "BoundarySpec":
        return cls("boundary_dominated")


@dataclass
class FdField:
    """Grid pressures at one time."""

    kind: str                      # "slab1d" | "grid2d"
    pressures: np.ndarray
    t: float
    well_index: Tuple[int, ...]

    def __post_init__(self):
        self.pressures = np.asarray(self.pressures, dtype=float)
        if not np.all(np.isfinite(self.pressures)):
            raise NonFiniteDetected(f"non-finite pressure at t={self.t}")

    def well_value(self) -> float:
        return float(self.pressures[self.well_index])


@dataclass
class FdSeries:
    """Sampled fields of one transient run plus the run's source spec."""

    fields: List[FdField]
    q_source: float
    boundary: BoundarySpec
    problem: ValidatedProblem
    scheme: str
    tau: float
    volumes: np.ndarray = field(repr=False, default=None)

    def content(self, k: int) -> float:
        """Total stored fluid C0 * sum(V_i p_i) of sample k."""
        return float(self.problem.params.storage
                     * np.sum(self.volumes * self.fields[k].pressures))

    def times(self) -> np.ndarray:
        return np.array([f.t for f in self.fields])


# ---------------------------------------------------------------------------
# 1-D slab system assembly
# ---------------------------------------------------------------------------

def _slab_system(problem: ValidatedProblem, boundary: BoundarySpec):
    grid, params = problem.grid, problem.params
    n_nodes = grid.n + 1
    d = grid.delta
    k = params.conductivity
    links = np.full(n_nodes - 1, k / d)
    volumes = np.full(n_nodes, d)
    volumes[0] = volumes[-1] = 0.5 * d
    dirichlet = np.zeros(n_nodes, dtype=bool)
    dir_values = np.zeros(n_nodes)
    if boundary.kind == "boundary_dominated":
        dirichlet[0] = True
        dir_values[0] = 0.0
    else:
        links[0] *= 2.0  # symmetric gallery
        if boundary.kind == "steady":
            dirichlet[-1] = True
            dir_values[-1] = boundary.p_e
    return links, volumes, dirichlet, dir_values


def fd_steady_1d(problem: ValidatedProblem, q: float, p_e: float) -> FdField:
    """Direct tridiagonal solve of the steady gallery problem.

    Interior nodes satisfy the discrete (flux-form) Laplace equation to
    rounding; the well node obeys the gallery balance T01 (p0 - p1) = q.
    """
    if not isinstance(problem.geometry, Slab1D):
        raise DomainError(("geometry", "fd_steady_1d is defined on the slab"))
    boundary = BoundarySpec.steady(p_e)
    links, volumes, dirichlet, dir_values = _slab_system(problem, boundary)
    n = len(volumes)
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    rhs = np.zeros(n)
    diag[0] = links[0]
    upper[0] = -links[0]
    rhs[0] = q
    for i in range(1, n - 1):
        lower[i] = -links[i - 1]
        diag[i] = links[i - 1] + links[i]
        upper[i] = -links[i]
    diag[-1] = 1.0
    rhs[-1] = p_e
    try:
        p = backend.tridiag_solve(lower, diag, upper, rhs)
    except ZeroDivisionError as exc:
        raise SingularSystem(str(exc)) from exc
    fld = FdField("slab1d", p, 0.0, (0,))
    scale = max(1.0, float(np.max(np.abs(p))))
    flux = links * (p[:-1] - p[1:])
    interior = np.abs(flux[1:] - flux[:-1])
    assert float(np.max(interior)) <= 1e-12 * scale, "interior flux residual"
    return fld


def _stable_tau(volumes, links, dirichlet, storage):
    t_sum = np.zeros(len(volumes))
    t_sum[:-1] += links
    t_sum[1:] += links
    active = ~dirichlet & (t_sum > 0)
    return float(np.min(storage * volumes[active] / t_sum[active]))


def _transient_1d(problem, boundary, q, t_end, initial, scheme, tau,
                  sample_interval):
    grid, params = problem.grid, problem.params
    links, volumes, dirichlet, dir_values = _slab_system(problem, boundary)
    n = len(volumes)
    c = params.storage * volumes
    source = np.zeros(n)
    if boundary.kind != "boundary_dominated":
        source[0] = q
    if initial is None:
        p = np.full(n, boundary.p_e if boundary.kind == "steady" else 0.0)
        t0 = 0.0
    else:
        p = np.array(initial.pressures, dtype=float)
        if p.shape != (n,):
            raise DomainError(("initial", f"expected {n} node values, got {p.shape}"))
        t0 = initial.t
    p[dirichlet] = dir_values[dirichlet]

    if scheme == "explicit":
        tau_max = _stable_tau(volumes, links, dirichlet, params.storage)
        if tau > tau_max * (1.0 + 1e-12):
            raise StabilityViolation(
                f"explicit step tau={tau} exceeds the stable limit {tau_max}",
                tau=tau, tau_max=tau_max)
        a_left = np.zeros(n)
        a_right = np.zeros(n)
        a_left[1:] = tau * links / c[1:]
        a_right[:-1] = tau * links / c[:-1]
        src = tau * source / c
        for arr in (a_left, a_right, src):
            arr[dirichlet] = 0.0
        stepper = lambda pp, m: backend.explicit_steps_1d(a_left, a_right, src, pp, m)
    else:
        lower = np.zeros(n)
        diag = np.zeros(n)
        upper = np.zeros(n)
        dvec = c / tau
        svec = source.copy()
        diag[:] = c / tau
        diag[:-1] += links
        diag[1:] += links
        lower[1:] = -links
        upper[:-1] = -links
        for i in np.nonzero(dirichlet)[0]:
            lower[i] = upper[i] = 0.0
            diag[i] = 1.0
            dvec[i] = 0.0
            svec[i] = dir_values[i]
        stepper = lambda pp, m: backend.implicit_steps_1d(lower, diag, upper,
                                                          dvec, svec, pp, m)
    return p, t0, volumes, (0,), "slab1d", stepper, (dirichlet, dir_values)


# ---------------------------------------------------------------------------
# 2-D five-point grid
# ---------------------------------------------------------------------------

def _grid2d_system(problem, boundary):
    grid, params = problem.grid, problem.params
    m = grid.n
    size = 2 * m + 1
    d = grid.delta
    k, h = params.conductivity, params.thickness
    half = np.ones(size)
    half[0] = half[-1] = 0.5
    volumes = d * d * h * np.outer(half, half)
    # horizontal link (i, j)-(i, j+1) has face width d*half[i]; vertical by symmetry
    t_horiz = k * h * np.repeat(half[:, None], size - 1, axis=1)
    t_vert = k * h * np.repeat(half[None, :], size - 1, axis=0)
    dirichlet = np.zeros((size, size), dtype=bool)
    dir_values = np.zeros((size, size))
    if boundary.kind == "steady":
        dirichlet[0, :] = dirichlet[-1, :] = True
        dirichlet[:, 0] = dirichlet[:, -1] = True
        dir_values[dirichlet] = boundary.p_e
    elif boundary.kind == "boundary_dominated":
        dirichlet[m, m] = True
    return volumes, t_horiz, t_vert, dirichlet, dir_values, (m, m)


def _transient_2d(problem, boundary, q, t_end, initial, scheme, tau,
                  sample_interval):
    grid, params = problem.grid, problem.params
    volumes, t_horiz, t_vert, dirichlet, dir_values, well = \
        _grid2d_system(problem, boundary)
    size = volumes.shape[0]
    c = params.storage * volumes
    source = np.zeros_like(volumes)
    if boundary.kind != "boundary_dominated":
        source[well] = q
    if initial is None:
        p = np.full_like(volumes, boundary.p_e if boundary.kind == "steady" else 0.0)
        t0 = 0.0
    else:
        p = np.array(initial.pressures, dtype=float)
        if p.shape != volumes.shape:
            raise DomainError(("initial", f"expected shape {volumes.shape}, got {p.shape}"))
        t0 = initial.t
    p[dirichlet] = dir_values[dirichlet]

    if scheme == "explicit":
        t_sum = np.zeros_like(volumes)
        t_sum[:, :-1] += t_horiz
        t_sum[:, 1:] += t_horiz
        t_sum[:-1, :] += t_vert
        t_sum[1:, :] += t_vert
        active = ~dirichlet
        tau_max = float(np.min(params.storage * volumes[active] / t_sum[active]))
        if tau > tau_max * (1.0 + 1e-12):
            raise StabilityViolation(
                f"explicit step tau={tau} exceeds the stable limit {tau_max}",
                tau=tau, tau_max=tau_max)
        a_n = np.zeros_like(volumes)
        a_s = np.zeros_like(volumes)
        a_w = np.zeros_like(volumes)
        a_e = np.zeros_like(volumes)
        a_n[1:, :] = tau * t_vert / c[1:, :]
        a_s[:-1, :] = tau * t_vert / c[:-1, :]
        a_w[:, 1:] = tau * t_horiz / c[:, 1:]
        a_e[:, :-1] = tau * t_horiz / c[:, :-1]
        src = tau * source / c
        for arr in (a_n, a_s, a_w, a_e, src):
            arr[dirichlet] = 0.0
        stepper = lambda pp, m_: backend.explicit_steps_2d(a_n, a_s, a_w, a_e,
                                                           src, pp, m_)
    else:
        import scipy.sparse as sp
        import scipy.sparse.linalg as spla

        n_tot = size * size
        idx = np.arange(n_tot).reshape(size, size)
        rows, cols, vals = [], [], []
        diag = (c / tau).ravel().copy()
        svec = source.ravel().copy()
        dvec = (c / tau).ravel().copy()

        def add_link(ia, ib, t):
            rows.extend((ia, ib, ia, ib))
            cols.extend((ia, ib, ib, ia))
            vals.extend((t, t, -t, -t))

        for i in range(size):
            for j in range(size - 1):
                add_link(idx[i, j], idx[i, j + 1], t_horiz[i, j])
        for i in range(size - 1):
            for j in range(size):
                add_link(idx[i, j], idx[i + 1, j], t_vert[i, j])
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(n_tot, n_tot)).tocsr()
        mat = mat + sp.diags(diag)
        dir_flat = dirichlet.ravel()
        mat = mat.tolil()
        for i in np.nonzero(dir_flat)[0]:
            mat.rows[i] = [i]
            mat.data[i] = [1.0]
            dvec[i] = 0.0
            svec[i] = dir_values.ravel()[i]
        lu = spla.splu(mat.tocsc())

        def stepper(pp, m_):
            flat = pp.ravel()
            for _ in range(m_):
                flat[:] = lu.solve(dvec * flat + svec)
            return pp

    return p, t0, volumes, well, "grid2d", stepper, (dirichlet, dir_values)


def fd_transient(problem: ValidatedProblem, boundary: BoundarySpec, q: float,
                 t_end: float, initial: Optional[FdField] = None,
                 scheme: str = "implicit", tau: Optional[float] = None,
                 sample_interval: Optional[float] = None) -> FdSeries:
    """Advance the diffusion problem and return uniformly sampled fields.

    ``q`` is the signed rate added to the well node.  The run covers
    round(t_end/tau) steps; fields are recorded every
    round(sample_interval/tau) steps, starting from the initial state.
    """
    if scheme not in ("implicit", "explicit"):
        raise DomainError(("scheme", "must be 'implicit' or 'explicit'"))
    tau = problem.grid.tau if tau is None else tau
    if tau <= 0:
        raise DomainError(("tau", "tau > 0"))
    if sample_interval is None:
        sample_interval = t_end / 32.0
    builder = _transient_1d if isinstance(problem.geometry, Slab1D) else _transient_2d
    p, t0, volumes, well, kind, stepper, (dirichlet, dir_values) = builder(
        problem, boundary, q, t_end, initial, scheme, tau, sample_interval)
    n_total = max(1, round(t_end / tau))
    chunk = max(1, round(sample_interval / tau))
    fields = [FdField(kind, p.copy(), t0, well)]
    done = 0
    while done < n_total:
        m = min(chunk, n_total - done)
        stepper(p, m)
        p[dirichlet] = dir_values[dirichlet]  # keep pinned values exact
        done += m
        if not np.all(np.isfinite(p)):
            raise NonFiniteDetected(f"non-finite values after {done} steps")
        fields.append(FdField(kind, p.copy(), t0 + done * tau, well))
    return FdSeries(fields=fields, q_source=q, boundary=boundary,
                    problem=problem, scheme=scheme, tau=tau, volumes=volumes)


# ---------------------------------------------------------------------------
# sample extraction and dumping
# ---------------------------------------------------------------------------

def _neighbor_value(fld: FdField) -> float:
    if fld.kind == "slab1d":
        return float(fld.pressures[1])
    i, j = fld.well_index
    p = fld.pressures
    return float(p[i - 1, j] + p[i + 1, j] + p[i, j - 1] + p[i, j + 1]) / 4.0


def extract_mb_samples(series: FdSeries) -> List[MBSample]:
    """Map consecutive sampled fields onto MB samples.

    p1 is the first neighbour (1-D) or the four-neighbour mean (2-D,
    isotropic stencil); q is the run's source rate; the sample step is the
    uniform spacing of the recorded fields.
    """
    if len(series.fields) < 2:
        raise InsufficientSamples("need at least 2 sampled fields")
    times = series.times()
    gaps = np.diff(times)
    if np.max(np.abs(gaps - gaps[0])) > 1e-9 * max(gaps[0], 1e-300):
        raise DomainError(("sampling", "fields are not uniformly spaced"))
    tau_s = float(gaps[0])
    out = []
    for fa, fb in zip(series.fields[:-1], series.fields[1:]):
        out.append(MBSample(p0_s=fa.well_value(), p1_s=_neighbor_value(fa),
                            p0_s_tau=fb.well_value(), q=series.q_source,
                            tau=tau_s))
    return out


def series_to_csv(series: FdSeries, path) -> None:
    """Dump every sampled field as rows (time, indices..., coordinate(s), pressure)."""
    import csv

    d = series.problem.grid.delta
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if series.fields[0].kind == "slab1d":
            w.writerow(["t", "i", "x", "pressure"])
            for fld in series.fields:
                for i, val in enumerate(fld.pressures):
                    w.writerow([format(fld.t, ".17g"), i, format(i * d, ".17g"),
                                format(val, ".17g")])
        else:
            w.writerow(["t", "i", "j", "x", "y", "pressure"])
            m = series.fields[0].well_index[0]
            for fld in series.fields:
                for i in range(fld.pressures.shape[0]):
                    for j in range(fld.pressures.shape[1]):
                        w.writerow([format(fld.t, ".17g"), i, j,
                                    format((j - m) * d, ".17g"),
                                    format((i - m) * d, ".17g"),
                                    format(fld.pressures[i, j], ".17g")])
