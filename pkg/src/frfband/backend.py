"""Selects the bootstrap kernel backend at import time.

The compiled extension is preferred; the pure-numpy module is the fallback.
Both implement the same pinned arithmetic and return bitwise-identical
results, so the choice affects speed only.  FRFBAND_KERNEL=python|cython
forces a backend (cython raises if the extension is missing, rather than
silently falling back).
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCED = os.environ.get("FRFBAND_KERNEL", "").strip().lower()

if _FORCED == "python":
    _impl = _kernels_py
elif _FORCED == "cython":
    from . import _kernels as _impl
elif _FORCED in ("", "auto"):
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
else:
    raise ImportError(
        f"FRFBAND_KERNEL must be 'python', 'cython', or 'auto', got {_FORCED!r}"
    )

diff_sigma = _impl.diff_sigma
pivot_stat = _impl.pivot_stat


def kernel_backend() -> str:
    """Name of the active kernel backend ('cython' or 'python')."""
    return _impl.BACKEND
