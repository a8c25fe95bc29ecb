import numpy as np
import pytest

from s2net.topology import Topology, build_deploy_as_whole

# Coordinates of the 9-switch, 2-space example network (switches A..I).
FIG1_COORDS = [
    [0.05, 0.17],  # A
    [0.13, 0.62],  # B
    [0.23, 0.91],  # C
    [0.36, 0.42],  # D
    [0.42, 0.53],  # E
    [0.51, 0.58],  # F
    [0.63, 0.73],  # G
    [0.78, 0.26],  # H
    [0.91, 0.97],  # I
]
A, B, C, D, E, F, G, H, I = range(9)


@pytest.fixture(scope="session")
def fig1_rings():
    """Example network after ring wiring, before free-port pairing."""
    return build_deploy_as_whole(9, 18, 6, coordinate_override=FIG1_COORDS,
                                 seed=0, pair_free_ports=False)


@pytest.fixture(scope="session")
def fig1():
    """Example network with free ports paired (seed-dependent pairing)."""
    return build_deploy_as_whole(9, 18, 6, coordinate_override=FIG1_COORDS,
                                 seed=0)


def make_graph(n, edges, L=0, w=None, servers=None, coords=None):
    """Hand-built topology for tests; defaults to a bare L=0 graph."""
    servers = (np.zeros(n, dtype=np.int64) if servers is None
               else np.asarray(servers, dtype=np.int64))
    degs = np.zeros(n, dtype=np.int64)
    for a, b in edges:
        degs[a] += 1
        degs[b] += 1
    if w is None:
        w = int((degs + servers).max())
    if coords is None:
        coords = np.empty((n, L))
    role = frozenset({"random"})
    return Topology(L=L, w=w, coords=np.asarray(coords, dtype=np.float64),
                    servers=servers,
                    edges={(min(a, b), max(a, b)): role for a, b in edges})


def ring_topology(coords_1d, w=None):
    """Single-space topology with explicit coordinates."""
    coords = np.asarray(coords_1d, dtype=np.float64)[:, None]
    n = len(coords)
    t = build_deploy_as_whole(n, 0, w if w is not None else 2,
                              coordinate_override=coords, seed=0,
                              pair_free_ports=False)
    return t
