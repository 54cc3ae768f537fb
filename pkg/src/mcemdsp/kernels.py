"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``MCEMDSP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
mh_sweeps = _pykernels.mh_sweeps
theta_objective = _pykernels.theta_objective

if not os.environ.get("MCEMDSP_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        mh_sweeps = _ckernels.mh_sweeps
        theta_objective = _ckernels.theta_objective
        BACKEND = "cython"

__all__ = ["BACKEND", "mh_sweeps", "theta_objective"]
