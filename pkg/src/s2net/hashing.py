"""Stable 64-bit hashing for flow placement and key addresses.

The generator below is fixed by constants in this file and is independent of
platform, process, and interpreter hash randomization. Changing it would
silently re-route every hashed flow and re-home every key, so don't.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 avalanche finalizer."""
    x &= _MASK
    x = (x + _GOLDEN) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stable_hash64(data: bytes, seed: int = 0) -> int:
    """Avalanche hash of a byte string into a 64-bit value."""
    h = splitmix64(seed ^ (len(data) & _MASK))
    for i in range(0, len(data), 8):
        chunk = int.from_bytes(data[i:i + 8].ljust(8, b"\0"), "little")
        h = splitmix64(h ^ chunk)
    return h


def hash_unit_interval(data: bytes, seed: int = 0) -> float:
    """Hash into [0, 1) by dividing the 64-bit value by 2**64."""
    return stable_hash64(data, seed) / 2.0 ** 64


@dataclass(frozen=True)
class FlowTuple:
    """Canonical flow identity: the classic 5-tuple."""

    src: int
    dst: int
    sport: int
    dport: int
    proto: int = 6

    def encode(self) -> bytes:
        return struct.pack("<qqHHB", self.src, self.dst,
                           self.sport & 0xFFFF, self.dport & 0xFFFF,
                           self.proto & 0xFF)

    def hash64(self) -> int:
        return stable_hash64(self.encode())
