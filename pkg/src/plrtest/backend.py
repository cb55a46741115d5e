"""Kernel backend selection.

The compiled extension is used when it built; setting PLRTEST_PURE=1 in the
environment forces the numpy fallback (useful for benchmarking and debugging).
Both backends are drop-in equivalent.
"""

from __future__ import annotations

import os

from . import _reference

if os.environ.get("PLRTEST_PURE"):
    _impl = _reference
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _reference

NATIVE: bool = _impl.NATIVE
ray_profiles = _impl.ray_profiles
cht_votes = _impl.cht_votes
