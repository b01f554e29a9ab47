"""Hot-loop kernels with backend selection at import time.

The compiled Cython extension (`treegibbs._kernels._core`) is preferred;
the NumPy implementation (`treegibbs._kernels._py`) is the fallback.  Set
TREEGIBBS_KERNELS=python or =compiled to force one (forcing `compiled`
raises if the extension is missing).  Both expose the same four entry
points and the same sampling laws.
"""

from __future__ import annotations

import os

from . import _py

_choice = os.environ.get("TREEGIBBS_KERNELS", "auto").strip().lower()

if _choice in ("auto", "", "compiled"):
    try:
        from . import _core as _impl
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _py
else:
    if _choice != "python":
        raise ValueError(
            f"TREEGIBBS_KERNELS must be 'auto', 'compiled' or 'python', got {_choice!r}"
        )
    _impl = _py

BACKEND = _impl.NAME
IS_COMPILED = _impl.IS_COMPILED

step_sizes = _impl.step_sizes
step_groups = _impl.step_groups
euler_scalar = _impl.euler_scalar
euler_groups = _impl.euler_groups


def available_backends() -> dict:
    """Importable backends by name (for tests and the benchmark)."""
    out = {"python": _py}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
