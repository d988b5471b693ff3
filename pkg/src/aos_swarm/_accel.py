"""Select between numba-compiled kernels and the pure-numpy fallback.

Set ``AOS_SWARM_NUMBA=0`` before import to force the numpy path. The flag is
read once; tests that need both paths import the kernel modules directly.
"""

import os

_flag = os.environ.get("AOS_SWARM_NUMBA", "1").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _flag not in ("0", "false", "no", "off")


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
