"""Kernel backend selection.

Prefers the compiled extension (`regenlab._ckernels`); falls back to the
numpy reference implementation when the extension is missing or when
``REGENLAB_FORCE_PURE`` is set.  Both backends produce identical streams and
identical integer outputs, so the choice only affects speed.
"""

from __future__ import annotations

import os

from regenlab import _purekernels as pure

if os.environ.get("REGENLAB_FORCE_PURE"):
    _impl = pure
else:
    try:
        from regenlab import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

IS_COMPILED: bool = bool(_impl.IS_COMPILED)
BACKEND_NAME: str = "compiled" if IS_COMPILED else "pure"

MASK64 = pure.MASK64
DEAD = pure.DEAD

mix64 = _impl.mix64
raw64 = _impl.raw64
u01 = _impl.u01
u01_lanes = _impl.u01_lanes
u01_indices = _impl.u01_indices
walk_future_mask = _impl.walk_future_mask
contact2_probe = _impl.contact2_probe
contact2_window_run = _impl.contact2_window_run
contact3_probe = _impl.contact3_probe
contact3_window_run = _impl.contact3_window_run
dcor_perm_numerators = _impl.dcor_perm_numerators

# the reference implementations stay importable for cross-checks/benchmarks
pure_impl = pure
