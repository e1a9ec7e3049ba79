"""Runtime selection of the numerical kernel implementation.

The compiled extension ``cpqr._core`` and the pure-Python module
``cpqr._kernels_py`` export the same three entry points.  The compiled one is
preferred when it imported cleanly; setting the environment variable
``CPQR_PURE_PYTHON=1`` forces the Python kernels (useful for debugging and
for the backend parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("CPQR_PURE_PYTHON", "").strip()

if _forced and _forced != "0":
    _impl = _kernels_py
    BACKEND_NAME = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND_NAME = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND_NAME = "python"

cp_accumulate = _impl.cp_accumulate
potential_eval = _impl.potential_eval
propagate = _impl.propagate


def implementations():
    """Return the available kernel modules keyed by backend name."""
    table = {"python": _kernels_py}
    try:
        from . import _core  # type: ignore[attr-defined]

        table["compiled"] = _core
    except ImportError:
        pass
    return table
