"""Kernel backend selection.

The compiled extension is used when importable; otherwise the pure-Python
kernels take over.  Both consume random bits in the same order, so the choice
affects speed only, never results.  Set ``COVERTREE_BACKEND=python`` or
``=compiled`` to force a backend (e.g. for the benchmark).
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("COVERTREE_BACKEND", "auto").strip().lower()
if _requested == "python":
    kernels = _pykernels
elif _requested == "compiled":
    if _compiled is None:
        raise ImportError(
            "COVERTREE_BACKEND=compiled but the covertree._kernels extension "
            "is not built; reinstall with a C toolchain available"
        )
    kernels = _compiled
elif _requested == "auto":
    kernels = _compiled if _compiled is not None else _pykernels
else:
    raise ValueError(f"COVERTREE_BACKEND must be auto, compiled or python, got {_requested!r}")

pykernels = _pykernels
compiled_kernels = _compiled


def active_backend() -> str:
    return "compiled" if kernels.COMPILED else "python"
