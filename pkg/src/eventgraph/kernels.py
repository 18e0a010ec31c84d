"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is used when it
is unavailable or when ``EVENTGRAPH_PURE_PYTHON`` is set to a non-empty value
other than ``0``.
"""

from __future__ import annotations

import os

from . import _kernels_py

_force_pure = os.environ.get("EVENTGRAPH_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

hash_user = _impl.hash_user
hash_users = _impl.hash_users
bottom_p = _impl.bottom_p
merge_bottom_p = _impl.merge_bottom_p
sketches_intersect = _impl.sketches_intersect

__all__ = [
    "BACKEND",
    "hash_user",
    "hash_users",
    "bottom_p",
    "merge_bottom_p",
    "sketches_intersect",
]
