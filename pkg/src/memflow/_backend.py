"""Pick the compiled core if it is importable, else the numpy fallback.

Set ``MEMFLOW_BACKEND=python`` to force the fallback.
"""

import os

from memflow import _fallback

_FORCE_PYTHON = os.environ.get("MEMFLOW_BACKEND", "").lower() == "python"

try:
    if _FORCE_PYTHON:
        raise ImportError("fallback forced by MEMFLOW_BACKEND")
    from memflow import _core as _impl

    NAME = "cython"
except ImportError:
    _impl = _fallback
    NAME = "python"

BACKENDS = {"python": _fallback}
if NAME == "cython":
    BACKENDS["cython"] = _impl


def get(name=None):
    """Return the backend module called ``name`` (default: the active one)."""
    if name is None:
        return _impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} not available; have {sorted(BACKENDS)}"
        ) from None
