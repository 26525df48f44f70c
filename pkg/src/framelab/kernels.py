"""Backend selection for the iterative kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise
the numpy implementation in ``_kernels_py`` takes over. Setting
``FRAMELAB_PURE_PYTHON=1`` forces the fallback.
"""

import os

from framelab import _kernels_py

try:
    if os.environ.get("FRAMELAB_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from framelab import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python', or None for the active one)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from framelab import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


ratio_terms = _impl.ratio_terms
softmin_value = _impl.softmin_value
softmin_value_grad = _impl.softmin_value_grad
clamp_norms = _impl.clamp_norms
ascend = _impl.ascend
tight_defect = _impl.tight_defect
fp_descent = _impl.fp_descent
