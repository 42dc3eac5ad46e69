"""Kernel backend selection.

The compiled Cython kernel is used when its extension module imported
successfully; otherwise the numpy/scipy fallback takes over.  The
``ZENOPHOT_BACKEND`` environment variable (``compiled`` or ``python``)
pins the choice, and callers may request a specific backend explicitly
(the benchmark does, to time both).
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

_env = os.environ.get("ZENOPHOT_BACKEND")
if _env not in (None, "", "compiled", "python"):
    raise RuntimeError(f"ZENOPHOT_BACKEND must be 'compiled' or 'python', got {_env!r}")
if _env == "compiled" and _compiled is None:
    raise RuntimeError("ZENOPHOT_BACKEND=compiled but the compiled kernel is not available")

DEFAULT_BACKEND: str = _env or ("compiled" if _compiled is not None else "python")


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _compiled is not None else ("python",)


def get_kernel(backend: str | None = None):
    """Return the kernel module for ``backend`` (default: best available)."""
    name = backend or DEFAULT_BACKEND
    if name == "python":
        return _kernel_py
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel requested but the extension is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
