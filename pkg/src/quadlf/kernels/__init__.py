"""Kernel backends: compiled Cython core with a numpy fallback.

The active backend is chosen at import time: the compiled extension if it
built, else the numpy fallback. ``QUADLF_KERNELS=pure|compiled`` overrides
(``compiled`` raises if the extension is unavailable). Both backends return
identical integers; floating statistics downstream are therefore byte-stable
across backends.
"""

from __future__ import annotations

import os

from . import pure

try:
    from . import _speed

    HAVE_COMPILED = True
except ImportError:
    _speed = None  # type: ignore[assignment]
    HAVE_COMPILED = False


def get_backend(name: str = "auto"):
    """Return the kernel module for `name` in {auto, compiled, pure}."""
    if name in ("auto", None):
        return _speed if HAVE_COMPILED else pure
    if name == "pure":
        return pure
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available in this install")
        return _speed
    raise ValueError(f"unknown kernel backend {name!r}")


DEFAULT = get_backend(os.environ.get("QUADLF_KERNELS", "auto"))
