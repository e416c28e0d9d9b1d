"""Backend selection for the hot kernels.

Numba is used when it imports and ``NEARFIELD_OM_DISABLE_NUMBA`` is unset
(or set to ``0``/``false``).  Otherwise the pure-numpy kernels are active.
The flag is read once, at import time.
"""
import os

DISABLE_ENV = "NEARFIELD_OM_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _disabled_by_env():
    value = os.environ.get(DISABLE_ENV, "").strip().lower()
    return value not in ("", "0", "false", "no", "off")


USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()


def maybe_njit(fn):
    """Compile ``fn`` with ``numba.njit`` when numba is importable.

    The compiled version is built even if the env flag disables numba, so
    the benchmark can compare both paths in one process.  Compilation is
    lazy (first call), so an unused kernel costs nothing.
    """
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
