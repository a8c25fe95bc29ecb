import numpy as np
import pytest

from s2net.geometry import (as_coords, circular_distance, control_area_size,
                            control_area_sizes, d_mcd, mcd,
                            normalize_coordinate)

from conftest import FIG1_COORDS, A, C, D, G, H, I


def test_circular_distance_reference_values():
    # distances to C's space-1 coordinate from the example network
    assert circular_distance(0.78, 0.23) == pytest.approx(0.45, abs=1e-12)
    assert circular_distance(0.1, 0.9) == pytest.approx(0.2, abs=1e-12)
    assert circular_distance(0.37, 0.37) == 0.0


def test_mcd_reference_values():
    coords = {k: FIG1_COORDS[k] for k in (A, C, D, G, H, I)}
    expected = {H: 0.35, A: 0.18, D: 0.13, G: 0.18, I: 0.06}
    for s, want in expected.items():
        assert mcd(coords[s], coords[C]) == pytest.approx(want, abs=1e-12)
    assert mcd(coords[H], coords[H]) == 0.0


def test_mcd_dimension_mismatch():
    with pytest.raises(ValueError):
        mcd([0.1, 0.2], [0.3])


def test_d_mcd_reference_values():
    h, c = FIG1_COORDS[H], FIG1_COORDS[C]
    assert d_mcd(h, c, 1) == pytest.approx(0.45, abs=1e-12)
    assert d_mcd(h, c, 2) == pytest.approx(0.35, abs=1e-12)
    assert d_mcd(h, c, 2) == mcd(h, c)
    assert d_mcd(h, h, 1) == 0.0
    for bad in (0, 3):
        with pytest.raises(ValueError):
            d_mcd(h, c, bad)


def test_control_area_examples():
    for x, left, right in [(0.0, 1 / 3, 2 / 3), (1 / 3, 0.0, 2 / 3),
                           (2 / 3, 0.0, 1 / 3)]:
        assert control_area_size(x, left, right) == pytest.approx(1 / 3)
    assert control_area_size(0.5, 0.4, 0.7) == pytest.approx(0.15, abs=1e-12)


def test_control_area_partition():
    rng = np.random.default_rng(5)
    for n in (2, 3, 17, 100):
        sizes = control_area_sizes(rng.random(n))
        assert sizes.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(sizes > 0)


def test_cd_properties():
    rng = np.random.default_rng(0)
    xs = rng.random(300)
    ys = rng.random(300)
    zs = rng.random(300)
    for x, y, z in zip(xs, ys, zs):
        cd = circular_distance(x, y)
        assert 0.0 <= cd <= 0.5
        assert cd == circular_distance(y, x)
        assert circular_distance(x, x) == 0.0
        # triangle bound on the ring
        assert circular_distance(x, z) <= (circular_distance(x, y)
                                           + circular_distance(y, z) + 1e-12)


def test_d_mcd_monotone_in_d():
    rng = np.random.default_rng(1)
    for _ in range(100):
        L = int(rng.integers(1, 7))
        a, b = rng.random(L), rng.random(L)
        vals = [d_mcd(a, b, d) for d in range(1, L + 1)]
        assert all(v1 >= v2 for v1, v2 in zip(vals, vals[1:]))
        assert vals[-1] == mcd(a, b)


def test_normalization():
    assert normalize_coordinate(1.0) == 0.0
    assert normalize_coordinate(-0.25) == pytest.approx(0.75)
    assert normalize_coordinate(2.5) == pytest.approx(0.5)
    arr = as_coords([1.0, -0.25, 0.3])
    assert np.all(arr >= 0.0) and np.all(arr < 1.0)
