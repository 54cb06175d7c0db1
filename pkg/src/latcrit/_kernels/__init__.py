"""Kernel backend selection.

The compiled Cython backend is used when present; the numpy backend is the
fallback.  Set LATCRIT_PURE_PYTHON=1 to force the fallback (the benchmark and
the parity tests import both backends explicitly instead).
"""

import os

from . import _npkern

if os.environ.get("LATCRIT_PURE_PYTHON"):
    _impl = _npkern
else:
    try:
        from . import _ckern as _impl
    except ImportError:
        _impl = _npkern

BACKEND = _impl.BACKEND_NAME

scan_best_approx = _impl.scan_best_approx
collect_in_ball = _impl.collect_in_ball
first_below = _impl.first_below
min_gauge = _impl.min_gauge
