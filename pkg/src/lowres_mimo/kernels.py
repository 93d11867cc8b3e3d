"""Backend selection for the hot kernels.

The compiled extension is used when it is importable. Setting the environment
variable ``LOWRES_MIMO_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("LOWRES_MIMO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        _impl = _compiled
        BACKEND = "cython"
else:
    _compiled = None

mrc_terms = _impl.mrc_terms
quantize_real = _impl.quantize_real


def available_backends():
    """Return ``{name: module}`` for every backend importable in this process."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
