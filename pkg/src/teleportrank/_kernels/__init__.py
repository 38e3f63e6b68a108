"""Kernel backend selection: compiled extension if available, else Python.

Set ``TELEPORTRANK_PURE_PYTHON=1`` to force the pure-Python backend (used
by the benchmark script and the parity tests).
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("TELEPORTRANK_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

walk_chunk = _impl.walk_chunk
move_sweep = _impl.move_sweep


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
