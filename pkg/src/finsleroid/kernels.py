"""Kernel backend selection.

The compiled module is used when it imports; otherwise the numpy kernels.
Set ``FINSLEROID_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("FINSLEROID_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_c as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.NAME

fmf = _impl.fmf
sigma = _impl.sigma
mu = _impl.mu
sigma_jacobian = _impl.sigma_jacobian
mu_jacobian = _impl.mu_jacobian
metric = _impl.metric


def available_backends():
    """Map backend name to kernel module for every backend importable here."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels_c

        out["cython"] = _kernels_c
    except ImportError:
        pass
    return out
