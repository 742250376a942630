"""Backend selection for the hot decoding kernels.

Set ``BAKER_AECC_NUMBA=0`` to force the pure-numpy path. When numba is not
importable the numpy path is used regardless.
"""
import os

try:
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old and warns on first parallel call
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    numba = None

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

    prange = range


def _flag_enabled(value):
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = HAVE_NUMBA and _flag_enabled(os.environ.get("BAKER_AECC_NUMBA", "1"))


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
