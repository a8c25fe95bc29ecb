"""Distance arithmetic on circular coordinate spaces.

All coordinates are reals in [0,1) with 0 and 1 superposed. Everything here
is pure and total; comparisons are exact on doubles (balanced generation
keeps coordinates at least 1/(3n) apart, far above machine epsilon).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def normalize_coordinate(value: float) -> float:
    """Reduce a coordinate into [0,1); 1.0 wraps to 0.0."""
    v = float(value) % 1.0
    # Python's % can return 1.0 for tiny negative inputs via rounding.
    return 0.0 if v >= 1.0 else v


def as_coords(values: Sequence[float]) -> np.ndarray:
    """Coordinate vector as a float64 array, normalized into [0,1)."""
    arr = np.asarray(values, dtype=np.float64) % 1.0
    arr[arr >= 1.0] = 0.0
    return arr


def circular_distance(x: float, y: float) -> float:
    """Shorter arc length between two ring coordinates; at most 0.5."""
    d = abs(x - y)
    return d if d <= 0.5 else 1.0 - d


def mcd(a: Sequence[float], b: Sequence[float]) -> float:
    """Minimum over spaces of the per-space circular distance."""
    if len(a) != len(b):
        raise ValueError(f"coordinate dimension mismatch: {len(a)} vs {len(b)}")
    return d_mcd(a, b, len(a))


def d_mcd(a: Sequence[float], b: Sequence[float], d: int) -> float:
    """Minimum circular distance restricted to the first d spaces."""
    if not 1 <= d <= len(a) or d > len(b):
        raise ValueError(f"space count d={d} out of range [1, {min(len(a), len(b))}]")
    best = 2.0
    for k in range(d):
        cd = abs(a[k] - b[k])
        if cd > 0.5:
            cd = 1.0 - cd
        if cd < best:
            best = cd
    return best


def control_area_size(x: float, left: float, right: float) -> float:
    """Size of the arc between the midpoints toward the two ring neighbors."""
    return 0.5 * circular_distance(x, left) + 0.5 * circular_distance(x, right)


def control_area_sizes(space_coords: np.ndarray) -> np.ndarray:
    """Control area of every coordinate in one space; sums to 1."""
    n = len(space_coords)
    if n == 1:
        return np.array([1.0])
    order = np.argsort(space_coords)
    xs = space_coords[order]
    gaps = np.diff(xs, append=xs[0] + 1.0)
    # each point owns half of the gap on either side
    sizes = 0.5 * (gaps + np.roll(gaps, 1))
    out = np.empty(n)
    out[order] = sizes
    return out
