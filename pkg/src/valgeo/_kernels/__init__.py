"""Hot-kernel backend selection.

The compiled extension is used when present; otherwise the pure-NumPy
implementation of the same algorithm takes over.  Set ``VALGEO_PURE_PYTHON=1``
to force the fallback (used by the benchmark and the backend-agreement tests).
"""

import os

from . import pywolfe

if os.environ.get("VALGEO_PURE_PYTHON"):
    _impl = pywolfe
else:
    try:
        from . import _mnp as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = pywolfe

BACKEND: str = _impl.BACKEND
hull_distances = _impl.hull_distances

__all__ = ["BACKEND", "hull_distances", "pywolfe"]
