"""Selects the scan-kernel backend at import time.

The compiled extension is preferred; the pure-Python twin is used when the
extension is unavailable or when ARENA_PURE_KERNEL is set (useful for the
benchmark and for cross-checking the two implementations).
"""

from __future__ import annotations

import os

if os.environ.get("ARENA_PURE_KERNEL"):
    from . import _kernel_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernel_py as _impl

        BACKEND = "pure"

find_flips = _impl.find_flips
valid_moves = _impl.valid_moves
has_any_move = _impl.has_any_move
mobility = _impl.mobility
apply_move_cells = _impl.apply_move_cells
count_cells = _impl.count_cells
