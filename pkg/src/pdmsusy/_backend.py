"""Jet kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
functionally identical. Set ``PDMSUSY_JET_BACKEND=python`` (or ``cython``)
to force a choice, e.g. for benchmarking.
"""

import os

from . import _jetcore_py

_forced = os.environ.get("PDMSUSY_JET_BACKEND", "").strip().lower()

if _forced == "python":
    kernels = _jetcore_py
elif _forced == "cython":
    from . import _jetcore as kernels  # noqa: F401  (ImportError is the signal)
else:
    try:
        from . import _jetcore as kernels
    except ImportError:
        kernels = _jetcore_py


def backend_name() -> str:
    """Name of the active kernel implementation ('cython' or 'python')."""
    return kernels.IMPLEMENTATION
