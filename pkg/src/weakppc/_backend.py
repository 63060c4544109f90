"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback.  ``WEAKPPC_BACKEND=python`` forces the fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

if os.environ.get("WEAKPPC_BACKEND", "").lower() == "python" or _ckernels is None:
    DEFAULT = "python"
else:
    DEFAULT = "cython"


def get(name=None):
    name = DEFAULT if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}") from None
