"""Kernel selection: the compiled extension if importable, else pure Python.

Set ``AGONY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
agony_d1 = _fallback.agony_d1
greedy_fas_order = _fallback.greedy_fas_order

if not os.environ.get("AGONY_PURE_PYTHON"):
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        agony_d1 = _kernels.agony_d1
        greedy_fas_order = _kernels.greedy_fas_order


def kernels(name: str):
    """Kernel table for ``"compiled"`` or ``"python"`` (benchmarks and tests)."""
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
