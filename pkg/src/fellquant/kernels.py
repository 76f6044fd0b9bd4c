"""Backend selection for the combinatorial inner loops.

The compiled extension is used when it was built; set ``FELLQUANT_PURE=1``
to force the Python versions (the test suite runs both).
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("FELLQUANT_PURE") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

assoc_violation = _impl.assoc_violation
set_product = _impl.set_product
line_convolve = _impl.line_convolve
subset_join_violation = _impl.subset_join_violation
