"""Selects the multiplicative-update backend at import time.

The compiled extension is preferred; the numpy implementation is the
fallback. ``PAIRNMF_BACKEND=python|cython`` forces a choice (useful for
benchmarks and for debugging kernel discrepancies).
"""

from __future__ import annotations

import os

from . import _mu_python

try:
    from . import _mu_kernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _mu_kernels = None

_FORCED = os.environ.get("PAIRNMF_BACKEND", "").strip().lower()

if _FORCED == "python":
    _active = _mu_python
elif _FORCED == "cython":
    if _mu_kernels is None:
        raise ImportError(
            "PAIRNMF_BACKEND=cython but the pairnmf._mu_kernels extension "
            "is not built"
        )
    _active = _mu_kernels
elif _FORCED in ("", "auto"):
    _active = _mu_kernels if _mu_kernels is not None else _mu_python
else:
    raise ImportError(f"unknown PAIRNMF_BACKEND value: {_FORCED!r}")


def active_kernels():
    """The module providing nmf_sweeps/gnmf_sweeps/frnmf_sweeps."""
    return _active


def backend_name() -> str:
    return _active.BACKEND


def available_backends() -> dict:
    """Name -> kernel module for every importable backend."""
    out = {"python": _mu_python}
    if _mu_kernels is not None:
        out["cython"] = _mu_kernels
    return out
