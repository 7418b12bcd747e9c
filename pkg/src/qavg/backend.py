"""Selects the statevector kernel implementation at import time.

The compiled extension is preferred; the pure-NumPy module is a drop-in
fallback.  Set ``QAVG_PURE_PYTHON=1`` to force the fallback, or call
``use("python"|"compiled")`` to switch explicitly (the benchmark does).
"""

from __future__ import annotations

import os

from . import _statevec_py

_impl = _statevec_py


def _load(name: str):
    if name == "python":
        return _statevec_py
    if name == "compiled":
        from . import _statevec_c

        return _statevec_c
    raise ValueError(f"unknown backend {name!r}")


def use(name: str) -> None:
    global _impl
    _impl = _load(name)


def kernels():
    """The active kernel module (apply_1q, apply_2q, prob_one, project)."""
    return _impl


def active() -> str:
    return _impl.BACKEND


if os.environ.get("QAVG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _statevec_py
else:
    try:
        _impl = _load("compiled")
    except ImportError:
        _impl = _statevec_py
