"""Select the coverage kernel at import time.

Prefers the compiled extension; falls back to the pure-Python twin when
the extension is missing or when CONDRISK_PURE_PYTHON=1 is set.  The two
lanes are bit-identical by construction, so the choice only affects
speed.
"""

import os

from . import _coverage_py

if os.environ.get("CONDRISK_PURE_PYTHON") == "1":
    _impl = _coverage_py
else:
    try:
        from . import _coverage_ext as _impl
    except ImportError:
        _impl = _coverage_py

cover_sums = _impl.cover_sums


def backend_name() -> str:
    """Name of the active kernel: "compiled" or "python"."""
    return _impl.BACKEND


def available_backends() -> dict:
    """Map of backend name to its cover_sums callable, for benchmarks."""
    out = {"python": _coverage_py.cover_sums}
    try:
        from . import _coverage_ext
    except ImportError:
        pass
    else:
        out["compiled"] = _coverage_ext.cover_sums
    return out
