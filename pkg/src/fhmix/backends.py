"""Backend selection for the sweep kernels.

The compiled extension is used when importable; FHMIX_BACKEND=python
forces the numpy fallback (FHMIX_BACKEND=compiled errors if the
extension is missing rather than silently degrading).  The two
backends are arithmetically interchangeable: identical inputs yield
bit-identical outputs.
"""

from __future__ import annotations

import os

from . import _kernels_py
from .errors import ConfigError

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None


def available_backends() -> list[str]:
    return (["compiled"] if _compiled is not None else []) + ["python"]


def default_backend() -> str:
    env = os.environ.get("FHMIX_BACKEND")
    if env:
        return env
    return "compiled" if _compiled is not None else "python"


def get_kernels(name: str | None = None):
    """Return the kernel module for `name` (None = default selection)."""
    name = name or default_backend()
    if name == "compiled":
        if _compiled is None:
            raise ConfigError("compiled backend requested but the extension is not built")
        return _compiled
    if name == "python":
        return _kernels_py
    raise ConfigError(f"unknown backend {name!r} (expected 'compiled' or 'python')")
