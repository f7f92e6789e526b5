"""Backend selection for the numerical kernels.

The compiled extension is used when it imports; setting the environment
variable ``DISCOPILE_PURE_PYTHON=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("DISCOPILE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

apply_unitary = _impl.apply_unitary
jacobi_eigh = _impl.jacobi_eigh

__all__ = ["BACKEND", "apply_unitary", "jacobi_eigh"]
