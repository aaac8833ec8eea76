"""SplitMix64 generator for reproducible simulation draws.

The exact algorithm (documented so traces can be reproduced elsewhere):
state advances by the 64-bit golden-ratio constant 0x9E3779B97F4A7C15;
each output is the new state put through two xor-shift-multiply rounds
(constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB) and a final 31-bit
xor-shift.  ``random()`` maps the 64-bit output onto [0, 1).
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    value &= MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & MASK64
    return value ^ (value >> 31)


def derive_seed(base: int, *parts: int) -> int:
    """Deterministically fold extra integers into a seed for an independent stream."""
    seed = base & MASK64
    for part in parts:
        seed = mix64((seed + GOLDEN + (part & MASK64)) & MASK64)
    return seed


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def random(self) -> float:
        """Uniform draw in [0, 1)."""
        return self.next_uint64() / 2.0**64
