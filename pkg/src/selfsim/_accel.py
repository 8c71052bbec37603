"""Backend selection for the hot kernels.

``SELFSIM_BACKEND=numpy`` forces the pure-numpy fallback path; the default
(``numba``) compiles the loop kernels with ``numba.njit`` when numba imports.
"""
import os
import warnings


class PerformanceWarning(UserWarning):
    pass


_requested = os.environ.get("SELFSIM_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"SELFSIM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    HAVE_NUMBA = False

if _requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
    warnings.warn("numba unavailable, falling back to numpy kernels", PerformanceWarning)

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def njit(func):
    """Compile ``func`` in nopython mode, or return it unchanged without numba."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


__all__ = ["BACKEND", "HAVE_NUMBA", "PerformanceWarning", "njit"]
