"""Compare the compiled stepping kernels against the numpy fallback.

Run from the repo root:

    python benchmarks/bench_kernels.py

The benchmark re-executes itself with WELLBLOCK_PURE_PYTHON=1 to time the
fallback in a clean interpreter (backend selection happens at import).
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def run_cases():
    from wellblock import fdsim
    from wellblock._backend import BACKEND
    from wellblock.core import FluidRockParams, GridSpec, RadialAnnulus, Slab1D, validate_problem

    params = FluidRockParams()
    results = {"backend": BACKEND, "cases": {}}

    # long implicit pseudo-steady run (the acceptance-scale workload)
    problem = validate_problem(params, Slab1D(10.0), GridSpec(0.1, 100, 1e-3))
    t0 = time.perf_counter()
    fdsim.fd_transient(problem, fdsim.BoundarySpec.pseudo_steady(), q=1.0,
                       t_end=700.0, tau=0.01, sample_interval=100.0)
    results["cases"]["implicit_1d_70k_steps_n100"] = time.perf_counter() - t0

    # explicit boundary-dominated decay
    x = np.arange(101) * 0.1
    init = fdsim.FdField("slab1d", np.sin(np.pi * x / 20.0), 0.0, (0,))
    t0 = time.perf_counter()
    fdsim.fd_transient(problem, fdsim.BoundarySpec.boundary_dominated(), 0.0,
                       40.0, initial=init, scheme="explicit", tau=2e-3,
                       sample_interval=10.0)
    results["cases"]["explicit_1d_20k_steps_n100"] = time.perf_counter() - t0

    # explicit five-point grid
    problem2 = validate_problem(params, RadialAnnulus(0.1, 8.0),
                                GridSpec(0.5, 16, 1e-3))
    t0 = time.perf_counter()
    fdsim.fd_transient(problem2, fdsim.BoundarySpec.pseudo_steady(), 1.0,
                       40.0, scheme="explicit", tau=0.02, sample_interval=10.0)
    results["cases"]["explicit_2d_2k_steps_33x33"] = time.perf_counter() - t0
    return results


def main():
    if os.environ.get("_WELLBLOCK_BENCH_CHILD") == "1":
        print(json.dumps(run_cases()))
        return
    here = run_cases()
    env = dict(os.environ, WELLBLOCK_PURE_PYTHON="1", _WELLBLOCK_BENCH_CHILD="1")
    out = subprocess.run([sys.executable, os.path.abspath(__file__)], env=env,
                         capture_output=True, text=True, check=True)
    other = json.loads(out.stdout.strip().splitlines()[-1])
    print(f"{'case':40s} {here['backend']:>10s} {other['backend']:>10s} {'speedup':>9s}")
    for name, t_here in here["cases"].items():
        t_other = other["cases"][name]
        print(f"{name:40s} {t_here:9.4f}s {t_other:9.4f}s {t_other / t_here:8.1f}x")


if __name__ == "__main__":
    main()
