"""Numeric kernels: compiled Cython core with a pure-numpy fallback.

The backend is chosen once at import time.  Set DIMERHHG_BACKEND=python
or DIMERHHG_BACKEND=compiled to force a choice (the latter raises if the
extension is not built).
"""

import os

from . import _pykernels

_forced = os.environ.get("DIMERHHG_BACKEND", "").lower()

if _forced not in ("", "python", "compiled"):
    raise ImportError(
        f"DIMERHHG_BACKEND={_forced!r} not recognized; use 'python' or 'compiled'")

if _forced == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _pykernels
        BACKEND = "python"

eigh_sym = _impl.eigh_sym
propagate_states = _impl.propagate_states
instantaneous_frames = _impl.instantaneous_frames

__all__ = ["BACKEND", "eigh_sym", "propagate_states", "instantaneous_frames"]
