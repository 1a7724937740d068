"""Sampling kernel backend selection.

Imports the compiled Cython kernels when the extension is available and
falls back to the pure-Python reference otherwise.  Both backends consume
identical uniform streams and return identical results; only speed differs.
Set ``TELESIM_PURE_KERNELS=1`` to force the pure-Python path.
"""
from __future__ import annotations

import os

from . import _pykernels

_compiled = None
if not os.environ.get("TELESIM_PURE_KERNELS"):
    try:
        from . import _ckernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _pykernels

BACKEND = "cython" if _compiled is not None else "python"

count_successes = _impl.count_successes
draw_categories = _impl.draw_categories
teleport_verify = _impl.teleport_verify
tomography_counts = _impl.tomography_counts


def backends() -> dict[str, object]:
    """The available kernel implementations, keyed by name (for benchmarks)."""
    out: dict[str, object] = {"python": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
