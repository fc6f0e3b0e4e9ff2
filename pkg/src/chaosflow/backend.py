"""Kernel backend selection.

The compiled Cython extension is preferred when importable; the NumPy
fallback is numerically equivalent.  Set CHAOSFLOW_BACKEND=python or
CHAOSFLOW_BACKEND=compiled to force a choice (forcing "compiled" raises if
the extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("CHAOSFLOW_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
    NAME = "python"
elif _forced == "compiled":
    from . import _ckernels as _impl  # noqa: F401

    NAME = "compiled"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        NAME = "compiled"
    except ImportError:
        _impl = _kernels_py
        NAME = "python"


def eval_plan(herm, offsets, cells, counts, weights):
    return _impl.eval_plan(herm, offsets, cells, counts, weights)


def get_backends():
    """All importable backends, for cross-checking and benchmarks."""
    impls = {"python": _kernels_py}
    try:
        from . import _ckernels

        impls["compiled"] = _ckernels
    except ImportError:
        pass
    return impls
