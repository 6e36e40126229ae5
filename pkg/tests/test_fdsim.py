"""Finite-difference simulator: steady glue, conservation, decay, extraction."""

import csv
import math

import numpy as np
import pytest

from wellblock import analytic, fdsim, mbal
from wellblock.core import (FluidRockParams, GridSpec, MBCoefficients,
                            RadialAnnulus, Slab1D, validate_problem)
from wellblock.errors import (DomainError, InsufficientSamples,
                              NonFiniteDetected, StabilityViolation)

PARAMS = FluidRockParams()


def slab_problem(delta=0.1, n=100, tau=1e-3):
    return validate_problem(PARAMS, Slab1D(r_e=n * delta),
                            GridSpec(delta=delta, n=n, tau=tau))


# ---------------------------------------------------------------------------
# steady solve
# ---------------------------------------------------------------------------

def test_steady_gap_and_glue():
    problem = slab_problem()
    fld = fdsim.fd_steady_1d(problem, q=1.0, p_e=0.0)
    gap = fld.pressures[0] - fld.pressures[1]
    assert gap == pytest.approx(0.05, abs=1e-12)  # q delta / (2K)
    prof = analytic.ss_profile_1d(PARAMS, problem.geometry, 1.0, 0.0)
    assert abs(fld.well_value() - prof.pressure(0.05)) <= 1e-10


def test_steady_zero_rate_is_uniform():
    problem = slab_problem()
    fld = fdsim.fd_steady_1d(problem, q=0.0, p_e=2.5)
    assert np.max(np.abs(fld.pressures - 2.5)) < 1e-13


def test_steady_nodes_match_profile_away_from_well():
    problem = slab_problem(delta=0.5, n=20)
    fld = fdsim.fd_steady_1d(problem, q=2.0, p_e=1.0)
    prof = analytic.ss_profile_1d(PARAMS, problem.geometry, 2.0, 1.0)
    for i in range(1, 21):
        assert fld.pressures[i] == pytest.approx(prof.pressure(0.5 * i), abs=1e-11)


# ---------------------------------------------------------------------------
# transient pseudo-steady
# ---------------------------------------------------------------------------

def test_pss_drift_and_conservation():
    problem = slab_problem()
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=1.0, t_end=700.0, tau=0.05,
                                sample_interval=25.0)
    drift = (series.fields[-1].well_value() - series.fields[-2].well_value()) / 25.0
    assert drift == pytest.approx(1.0 / (PARAMS.storage * 10.0), rel=1e-3)
    gained = series.content(-1) - series.content(0)
    injected = 1.0 * series.fields[-1].t
    assert abs(gained - injected) <= 1e-8 * injected


def test_pss_fd_samples_satisfy_mb_at_fd_tolerance():
    problem = slab_problem()
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=1.0, t_end=700.0, tau=0.05,
                                sample_interval=25.0)
    samples = fdsim.extract_mb_samples(series)[-4:]
    coeffs = MBCoefficients.for_slab(PARAMS, problem.grid)
    for s in samples:
        assert abs(mbal.mb_residual(s, coeffs, problem.grid.delta)) <= 5e-3
    report = mbal.check_pss_constraints(samples, PARAMS, problem.geometry,
                                        rel_tol=5e-3)
    assert report.overall


def test_zero_source_uniform_initial_is_constant():
    problem = slab_problem(delta=0.5, n=20)
    init = fdsim.FdField("slab1d", np.full(21, 3.0), 0.0, (0,))
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=0.0, t_end=10.0, initial=init, tau=0.1)
    assert np.max(np.abs(series.fields[-1].pressures - 3.0)) < 1e-13


# ---------------------------------------------------------------------------
# transient boundary-dominated
# ---------------------------------------------------------------------------

def test_bd_decay_rate():
    problem = slab_problem()
    lam = math.pi / 20.0
    x = np.arange(101) * 0.1
    init = fdsim.FdField("slab1d", np.sin(lam * x), 0.0, (0,))
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.boundary_dominated(),
                                q=0.0, t_end=45.0, initial=init, tau=0.02,
                                sample_interval=3.0)
    ts = series.times()
    vals = np.array([f.pressures[50] for f in series.fields])
    rate = -np.polyfit(ts, np.log(vals), 1)[0]
    expected = PARAMS.conductivity * lam**2
    assert abs(rate - expected) / expected < 0.02


def test_bd_well_node_pinned_to_zero():
    problem = slab_problem(delta=0.5, n=20)
    x = np.arange(21) * 0.5
    init = fdsim.FdField("slab1d", np.sin(math.pi * x / 20.0), 0.0, (0,))
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.boundary_dominated(),
                                q=0.0, t_end=5.0, initial=init, tau=0.05)
    assert all(f.pressures[0] == 0.0 for f in series.fields)


# ---------------------------------------------------------------------------
# schemes and guards
# ---------------------------------------------------------------------------

def test_explicit_matches_implicit_on_short_run():
    problem = slab_problem(delta=0.5, n=20, tau=1e-3)
    tau = 0.05  # stable: C0 delta^2/(4K) = 0.0625
    kw = dict(q=1.0, t_end=5.0, tau=tau, sample_interval=1.0)
    a = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                           scheme="explicit", **kw)
    b = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                           scheme="implicit", **kw)
    diff = np.max(np.abs(a.fields[-1].pressures - b.fields[-1].pressures))
    assert diff < 0.05  # O(tau) schemes agree to leading order


def test_explicit_stability_guard():
    problem = slab_problem()
    with pytest.raises(StabilityViolation) as exc:
        fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(), 1.0,
                           1.0, scheme="explicit", tau=0.05)
    assert exc.value.tau_max < 0.05


def test_explicit_conservation():
    problem = slab_problem(delta=0.5, n=20, tau=1e-3)
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=1.0, t_end=5.0, scheme="explicit", tau=0.05)
    gained = series.content(-1) - series.content(0)
    assert abs(gained - 5.0) <= 1e-10 * 5.0


def test_non_finite_initial_rejected():
    with pytest.raises(NonFiniteDetected):
        fdsim.FdField("slab1d", np.array([1.0, float("nan")]), 0.0, (0,))


def test_initial_shape_mismatch():
    problem = slab_problem(delta=0.5, n=20)
    init = fdsim.FdField("slab1d", np.zeros(5), 0.0, (0,))
    with pytest.raises(DomainError):
        fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(), 1.0,
                           1.0, initial=init, tau=0.1)


def test_determinism():
    problem = slab_problem(delta=0.5, n=20)
    kw = dict(q=1.0, t_end=5.0, tau=0.05, sample_interval=1.0)
    a = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(), **kw)
    b = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(), **kw)
    assert all(np.array_equal(x.pressures, y.pressures)
               for x, y in zip(a.fields, b.fields))


def test_boundary_spec_validation():
    with pytest.raises(DomainError):
        fdsim.BoundarySpec("weird")


def test_singular_system_guard():
    from wellblock import _backend
    import wellblock.fdsim as fs
    problem = slab_problem(delta=0.5, n=20)

    def broken_solve(lower, diag, upper, rhs):
        raise ZeroDivisionError("zero pivot")

    orig = _backend.tridiag_solve
    fs_backend = fs.backend
    try:
        fs_backend.tridiag_solve = broken_solve
        with pytest.raises(fdsim.SingularSystem):
            fdsim.fd_steady_1d(problem, 1.0, 0.0)
    finally:
        fs_backend.tridiag_solve = orig


# ---------------------------------------------------------------------------
# sample extraction
# ---------------------------------------------------------------------------

def test_extract_steady_samples_have_zero_drift():
    problem = slab_problem(delta=0.5, n=20)
    fld = fdsim.fd_steady_1d(problem, q=1.0, p_e=0.0)
    init = fdsim.FdField("slab1d", fld.pressures.copy(), 0.0, (0,))
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.steady(0.0), 1.0,
                                2.0, initial=init, tau=0.1, sample_interval=0.5)
    samples = fdsim.extract_mb_samples(series)
    for s in samples:
        assert s.p0_s_tau == pytest.approx(s.p0_s, abs=1e-12)


def test_extract_requires_two_fields():
    problem = slab_problem(delta=0.5, n=20)
    fld = fdsim.fd_steady_1d(problem, 1.0, 0.0)
    series = fdsim.FdSeries([fld], 1.0, fdsim.BoundarySpec.steady(), problem,
                            "implicit", 0.1, np.ones(21))
    with pytest.raises(InsufficientSamples):
        fdsim.extract_mb_samples(series)


# ---------------------------------------------------------------------------
# 2-D grid
# ---------------------------------------------------------------------------

def grid2d_problem(delta=0.5, n=8):
    return validate_problem(PARAMS, RadialAnnulus(r_w=0.1, r_e=n * delta),
                            GridSpec(delta=delta, n=n, tau=1e-3))


def test_2d_symmetry_and_neighbors():
    problem = grid2d_problem()
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=1.0, t_end=2.0, tau=0.01, sample_interval=0.5)
    f = series.fields[-1]
    i, j = f.well_index
    nb = [f.pressures[i - 1, j], f.pressures[i + 1, j],
          f.pressures[i, j - 1], f.pressures[i, j + 1]]
    assert max(nb) - min(nb) <= 1e-10
    samples = fdsim.extract_mb_samples(series)
    # the last sample reads its p1 from the second-to-last field
    g = series.fields[-2]
    mean_nb = (g.pressures[i - 1, j] + g.pressures[i + 1, j]
               + g.pressures[i, j - 1] + g.pressures[i, j + 1]) / 4.0
    assert samples[-1].p1_s == pytest.approx(mean_nb, abs=1e-12)


def test_2d_conservation_implicit_and_explicit():
    problem = grid2d_problem()
    for scheme, tau in (("implicit", 0.01), ("explicit", 0.01)):
        series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                    q=1.0, t_end=1.0, scheme=scheme, tau=tau)
        gained = series.content(-1) - series.content(0)
        assert abs(gained - 1.0) <= 1e-9


def test_2d_pss_mb_residual_small():
    problem = grid2d_problem()
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=1.0, t_end=60.0, tau=0.05, sample_interval=5.0)
    samples = fdsim.extract_mb_samples(series)[-3:]
    coeffs = MBCoefficients.for_radial(PARAMS, problem.grid)
    for s in samples:
        assert abs(mbal.mb_residual(s, coeffs, problem.grid.delta)) <= 5e-3


def test_2d_steady_dirichlet_border():
    problem = grid2d_problem()
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.steady(1.5), q=1.0,
                                t_end=2.0, tau=0.01)
    f = series.fields[-1]
    assert np.allclose(f.pressures[0, :], 1.5)
    assert np.allclose(f.pressures[:, -1], 1.5)
    assert f.well_value() > 1.5  # source raises the well block


# ---------------------------------------------------------------------------
# refinement and dump
# ---------------------------------------------------------------------------

def test_grid_refinement_glue_improves():
    # the steady glue is exact; check the transient pseudo-steady shape gap
    # |FD p0 - analytic at r0| shrinks over 3 refinements
    from wellblock import solvers
    gaps = []
    for delta in (0.4, 0.2, 0.1):
        n = round(10.0 / delta)
        problem = slab_problem(delta=delta, n=n)
        prof = analytic.pss_profile_1d(PARAMS, problem.geometry, 1.0)
        x = np.arange(n + 1) * delta
        init = fdsim.FdField("slab1d", -np.vectorize(prof.shape)(x), 0.0, (0,))
        series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                    1.0, 650.0, initial=init, tau=0.1,
                                    sample_interval=650.0)
        sol = solvers.r0_pss_1d(problem.grid, problem.geometry)
        t = series.fields[-1].t
        glue = -prof.shape(sol.r0) + (1.0 / (PARAMS.storage * 10.0)) * t
        gaps.append(abs(series.fields[-1].well_value() - glue))
    assert gaps[0] > gaps[1] > gaps[2]


def test_series_to_csv(tmp_path):
    problem = slab_problem(delta=0.5, n=20)
    series = fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(),
                                q=1.0, t_end=1.0, tau=0.1, sample_interval=0.5)
    path = tmp_path / "dump.csv"
    fdsim.series_to_csv(series, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["t"] == "0"
    assert len(rows) == len(series.fields) * 21
    assert float(rows[-1]["pressure"]) == series.fields[-1].pressures[-1]
