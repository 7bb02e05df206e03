"""Kernel backend selection.

The package ships two implementations of its hot numerical kernels: a numba
njit version (``_kernels_numba``) and a pure-numpy version
(``_kernels_numpy``).  The environment variable ``LOCKERN_BACKEND`` picks one:

    LOCKERN_BACKEND=numba   force the jit kernels (error if numba is missing)
    LOCKERN_BACKEND=numpy   force the numpy fallbacks
    unset / "auto"          numba when importable, numpy otherwise

``benchmarks/bench_backends.py`` times the two side by side.
"""

import os

_requested = os.environ.get("LOCKERN_BACKEND", "auto").strip().lower()

try:
    import numba  # noqa: F401
    _have_numba = True
except ImportError:
    _have_numba = False

if _requested == "numba":
    if not _have_numba:
        raise ImportError("LOCKERN_BACKEND=numba but numba is not importable")
    _use_numba = True
elif _requested == "numpy":
    _use_numba = False
elif _requested in ("", "auto"):
    _use_numba = _have_numba
else:
    raise ValueError(f"unknown LOCKERN_BACKEND={_requested!r} (use numba|numpy|auto)")

if _use_numba:
    from . import _kernels_numba as kernels
else:
    from . import _kernels_numpy as kernels


def backend_name():
    return "numba" if _use_numba else "numpy"


def set_threads(n):
    """Best-effort thread-count control for the jit backend."""
    if _use_numba and n:
        import numba
        numba.set_num_threads(max(1, int(n)))


# metric codes shared by the distance kernels
METRIC_EUCLID = 0
METRIC_TORUS = 1
METRIC_SPHERE = 2
