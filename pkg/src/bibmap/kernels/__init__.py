"""Kernel backend selection.

The compiled extension is used when available; the pure-Python module is a
drop-in replacement. Set ``BIBMAP_KERNELS=pure`` or ``native`` to force a
backend, or pass ``backend=`` to the high-level functions that accept it.
"""

from __future__ import annotations

import importlib
import os

from . import _pure

_forced = os.environ.get("BIBMAP_KERNELS", "").strip().lower()
if _forced not in ("", "pure", "native"):
    raise RuntimeError(f"BIBMAP_KERNELS must be 'pure' or 'native', got {_forced!r}")

_native = None
if _forced != "pure":
    try:
        _native = importlib.import_module("._native", __name__)
    except ImportError:
        if _forced == "native":
            raise

DEFAULT_BACKEND = "native" if _native is not None else "pure"


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (or the default backend)."""
    name = name or DEFAULT_BACKEND
    if name == "pure":
        return _pure
    if name == "native":
        if _native is None:
            raise RuntimeError("native kernels are not built; install with the compiled extension")
        return _native
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name() -> str:
    return DEFAULT_BACKEND
