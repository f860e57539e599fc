"""Hot inner kernels with backend selection at import time.

The compiled Cython extension (semkit.kernels._core) is preferred; if it is
missing (source checkout without a build) the pure-numpy implementation in
_fallback takes over with identical semantics. Set SEMKIT_FORCE_PYTHON=1 to
pin the fallback, e.g. for benchmarking or debugging.

Exported: grad_ref_2d, grad_ref_3d, stiffness_2d, stiffness_3d, tensor2,
tensor3, and BACKEND ("cython" or "python").
"""

import os

from semkit.kernels import _fallback

if os.environ.get("SEMKIT_FORCE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from semkit.kernels import _core as _impl
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND

grad_ref_2d = _impl.grad_ref_2d
grad_ref_3d = _impl.grad_ref_3d
stiffness_2d = _impl.stiffness_2d
stiffness_3d = _impl.stiffness_3d
tensor2 = _impl.tensor2
tensor3 = _impl.tensor3

__all__ = [
    "BACKEND",
    "grad_ref_2d",
    "grad_ref_3d",
    "stiffness_2d",
    "stiffness_3d",
    "tensor2",
    "tensor3",
]
