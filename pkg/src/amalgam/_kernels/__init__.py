"""Kernel backend selection.

The compiled extension is preferred when present; setting ``AMALGAM_PURE=1``
forces the pure-Python implementations.  Both backends expose the same
functions with bit-identical results (see tests/test_kernels.py).
"""

import os

from . import _pykernels

if os.environ.get("AMALGAM_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
bfs_dists = _impl.bfs_dists
enum_embeddings = _impl.enum_embeddings
min_subset_slack = _impl.min_subset_slack
min_superset_delta = _impl.min_superset_delta
