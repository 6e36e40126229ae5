"""Kernel backend selection: compiled extension if available, else numpy.

Set WELLBLOCK_PURE_PYTHON=1 to force the fallback (used by the benchmark
to compare both).
"""

import os

if os.environ.get("WELLBLOCK_PURE_PYTHON", "") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND
tridiag_solve = kernels.tridiag_solve
implicit_steps_1d = kernels.implicit_steps_1d
explicit_steps_1d = kernels.explicit_steps_1d
explicit_steps_2d = kernels.explicit_steps_2d
