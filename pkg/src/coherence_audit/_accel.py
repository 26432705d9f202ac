"""Optional numba acceleration.

Set ``COHERENCE_AUDIT_DISABLE_NUMBA=1`` to force the pure-numpy kernels.
The flag is read once, at import time.
"""
import os

_DISABLED = os.environ.get("COHERENCE_AUDIT_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(func):
    """Compile ``func`` with numba when available, else return it untouched."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def thread_count():
    """Worker cap from ``COHERENCE_AUDIT_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("COHERENCE_AUDIT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"COHERENCE_AUDIT_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ValueError("COHERENCE_AUDIT_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)
