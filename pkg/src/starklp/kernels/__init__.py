"""Hot numerical kernels with a selectable backend.

The numba backend is used by default. Setting ``STARK_DISABLE_JIT=1`` (or
running without numba installed) selects the vectorized numpy backend.
``STARK_THREADS`` caps numba's thread pool.

All kernels take and return 1-D/2-D ``float64``/``complex128`` arrays.
"""
import os

from . import numpy_impl

_FLAG = os.environ.get("STARK_DISABLE_JIT", "").strip().lower()
USE_JIT = _FLAG not in ("1", "true", "yes", "on")

if USE_JIT:
    try:
        import numba
        from . import jit as _impl
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USE_JIT = False
        _impl = numpy_impl
    else:
        _threads = os.environ.get("STARK_THREADS")
        if _threads:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
else:
    _impl = numpy_impl

BACKEND = "numba" if USE_JIT else "numpy"

faddeeva = _impl.faddeeva
faddeeva_scalar = _impl.faddeeva_scalar
spectral_sum = _impl.spectral_sum
pv_pair_sum = _impl.pv_pair_sum

__all__ = ["BACKEND", "USE_JIT", "faddeeva", "faddeeva_scalar",
           "spectral_sum", "pv_pair_sum", "numpy_impl"]
