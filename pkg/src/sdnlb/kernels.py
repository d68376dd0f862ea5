"""Kernel backend selection.

The compiled extension (sdnlb._ckernels, built from Cython) is used when it
imported successfully; otherwise the pure-Python twin takes over. Set
SDNLB_PURE_KERNELS=1 to force the pure backend, e.g. for benchmarking or to
rule the extension out when debugging.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("SDNLB_PURE_KERNELS") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND: str = _impl.BACKEND

simplified_loads = _impl.simplified_loads
full_loads = _impl.full_loads
candidate_efficiencies = _impl.candidate_efficiencies
