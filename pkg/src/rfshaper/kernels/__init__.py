"""Frequency-sweep kernels with a compiled core and a NumPy fallback.

The Cython extension ``rfshaper.kernels._core`` is preferred when it was
built; otherwise the NumPy reference in ``_ref`` is used.  Setting the
environment variable ``RFSHAPER_PURE_PYTHON=1`` before import forces the
fallback, which is handy for benchmarking and debugging.
"""

from __future__ import annotations

import os

from . import _ref

_FORCED_PURE = os.environ.get("RFSHAPER_PURE_PYTHON", "") == "1"

if not _FORCED_PURE:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _ref
        BACKEND = "python"
else:
    _impl = _ref
    BACKEND = "python"

waveguide_grid = _impl.waveguide_grid
ring_allpass_grid = _impl.ring_allpass_grid
ring_adddrop_grid = _impl.ring_adddrop_grid
beat_phasor_grid = _impl.beat_phasor_grid


def backend_name() -> str:
    """Which kernel implementation is active: ``compiled`` or ``python``."""
    return BACKEND
