"""Hot scanning kernels.

The compiled extension is used when it was built; otherwise (or when
``PRODREC_PURE_PYTHON=1`` is set) the numpy fallback is loaded instead.
``BACKEND`` names the implementation in use.
"""

import os

from . import _fallback as fallback

compiled = None
if os.environ.get("PRODREC_PURE_PYTHON", "") != "1":
    try:
        from . import _core as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else fallback
BACKEND = "cython" if compiled is not None else "python"

longest_zero_run = _impl.longest_zero_run
first_one_run = _impl.first_one_run
first_ps_window = _impl.first_ps_window
best_density = _impl.best_density
match_cylinder = _impl.match_cylinder

__all__ = [
    "BACKEND",
    "best_density",
    "compiled",
    "fallback",
    "first_one_run",
    "first_ps_window",
    "longest_zero_run",
    "match_cylinder",
]
