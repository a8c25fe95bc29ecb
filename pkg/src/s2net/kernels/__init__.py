"""Kernel dispatch: numba JIT by default, numpy fallback on request.

Set S2_NO_NUMBA=1 to force the pure numpy/scipy implementations (used by
the benchmark and as a safety net where numba is unavailable). Both
backends produce identical results.
"""

import os

_FORCE_NUMPY = os.environ.get("S2_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _FORCE_NUMPY:
    try:
        from . import backend_numba as _backend
        BACKEND = "numba"
    except ImportError:
        from . import backend_numpy as _backend
        BACKEND = "numpy"
else:
    from . import backend_numpy as _backend
    BACKEND = "numpy"

two_hop_tables = _backend.two_hop_tables
bfs_distances = _backend.bfs_distances
greedy_hops = _backend.greedy_hops
key_terminals = _backend.key_terminals
min_pairwise_mcd = _backend.min_pairwise_mcd
dinic_max_flow = _backend.dinic_max_flow


def backend_name() -> str:
    return BACKEND
