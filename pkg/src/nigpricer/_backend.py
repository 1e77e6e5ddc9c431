"""Backend selection for the hot series kernels.

The accumulation loops over series term grids are the runtime hot spots.
They exist in two variants: numba ``@njit`` loops and vectorized pure-numpy
fallbacks.  The active variant is chosen once at import time:

* ``NIGPRICER_BACKEND=numpy``  force the pure-numpy fallback,
* ``NIGPRICER_BACKEND=numba``  require numba (error if unavailable),
* unset / ``auto``             use numba when importable, else numpy.
"""

import os

_requested = os.environ.get("NIGPRICER_BACKEND", "auto").strip().lower()

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None
    HAVE_NUMBA = False

if _requested == "numpy":
    USE_NUMBA = False
elif _requested == "numba":
    if not HAVE_NUMBA:
        raise RuntimeError("NIGPRICER_BACKEND=numba but numba is not importable")
    USE_NUMBA = True
elif _requested == "auto":
    USE_NUMBA = HAVE_NUMBA
else:
    raise RuntimeError(
        f"NIGPRICER_BACKEND={_requested!r} not understood (use auto, numba or numpy)"
    )


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
