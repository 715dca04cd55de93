"""Deterministic bit streams shared by the pure-Python and numba code paths.

Every replica draws from its own xoshiro256** stream.  The stream seed is a
documented function of ``(master_seed, replica_index)``::

    replica_seed(m, i) = mix64((m + GOLDEN * (i + 1)) mod 2**64)

where ``mix64`` is the splitmix64 finalizer.  The four xoshiro state words are
the first four splitmix64 outputs started from that seed.  Bits are consumed
least-significant first from each 64-bit output word; bit 1 means a step to
the right (+1) and, for geometric draws, a "failure" that extends the count.

The state of a stream lives in a ``uint64[6]`` array
``[s0, s1, s2, s3, buffered_word, bits_left]`` so that jitted kernels and the
Python wrapper below advance exactly the same sequence.
"""
from __future__ import annotations

from collections.abc import Iterable

import numpy as np
from numba import njit, uint64

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    state = (state + GOLDEN) & MASK64
    return state, mix64(state)


def replica_seed(master_seed: int, replica_index: int) -> int:
    if not 0 <= master_seed <= MASK64:
        raise ValueError(f"master seed must be a 64-bit unsigned integer, got {master_seed}")
    if replica_index < 0:
        raise ValueError("replica index must be non-negative")
    return mix64(master_seed + GOLDEN * (replica_index + 1))


def stream_state(seed: int) -> np.ndarray:
    """Fresh ``uint64[6]`` stream state for a 64-bit seed."""
    st = np.zeros(6, dtype=np.uint64)
    s = seed & MASK64
    for i in range(4):
        s, out = splitmix64(s)
        st[i] = out
    if not st[:4].any():  # all-zero xoshiro state is a fixed point
        st[0] = 1
    return st


def replica_state(master_seed: int, replica_index: int) -> np.ndarray:
    return stream_state(replica_seed(master_seed, replica_index))


@njit(inline="always", cache=True)
def _rotl(x, k):
    return (x << uint64(k)) | (x >> uint64(64 - k))


@njit(cache=True)
def next_u64(st):
    s0, s1, s2, s3 = st[0], st[1], st[2], st[3]
    result = _rotl(s1 * uint64(5), 7) * uint64(9)
    t = s1 << uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    st[0], st[1], st[2], st[3] = s0, s1, s2, s3
    return result


@njit(cache=True)
def next_bit(st):
    if st[5] == 0:
        st[4] = next_u64(st)
        st[5] = uint64(64)
    b = st[4] & uint64(1)
    st[4] >>= uint64(1)
    st[5] -= uint64(1)
    return np.int64(b)


@njit(cache=True)
def next_step(st):
    return 2 * next_bit(st) - 1


@njit(cache=True)
def geometric(st):
    """Number of 1-bits before the first 0-bit: P(g = n) = 2**-(n+1)."""
    g = 0
    while next_bit(st) == 1:
        g += 1
    return g


@njit(cache=True)
def negbin(st, n):
    """Sum of ``n`` independent geometric(1/2) draws on {0, 1, ...}."""
    total = 0
    for _ in range(n):
        while next_bit(st) == 1:
            total += 1
    return total


@njit(cache=True)
def _mix64_nb(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True)
def seed_replica(master, index, st):
    """In-kernel twin of ``replica_state``: fills ``st`` for replica ``index``."""
    s = _mix64_nb(uint64(master) + uint64(GOLDEN) * uint64(index + 1))
    for i in range(4):
        s = s + uint64(GOLDEN)
        st[i] = _mix64_nb(s)
    if st[0] == 0 and st[1] == 0 and st[2] == 0 and st[3] == 0:
        st[0] = uint64(1)
    st[4] = uint64(0)
    st[5] = uint64(0)


class BitStream:
    """Python handle on a replica stream; same bit order as the jitted kernels."""

    def __init__(self, seed: int = 0, *, state: np.ndarray | None = None):
        self.state = stream_state(seed) if state is None else state

    @classmethod
    def for_replica(cls, master_seed: int, replica_index: int) -> "BitStream":
        return cls(state=replica_state(master_seed, replica_index))

    def next_bit(self) -> int:
        return int(next_bit(self.state))

    def step(self) -> int:
        return 2 * self.next_bit() - 1

    def geometric(self) -> int:
        return int(geometric(self.state))


class FixedSteps:
    """A scripted source of steps or bits, for hand-traced tests.

    Accepts a sequence of ``+1``/``-1`` steps (or a string of ``+``/``-``).
    Raises ``EOFError`` when exhausted so a test never silently reads past
    its script.
    """

    def __init__(self, steps: Iterable[int] | str):
        if isinstance(steps, str):
            steps = [1 if c == "+" else -1 for c in steps if c in "+-"]
        self._steps = list(steps)
        if any(s not in (1, -1) for s in self._steps):
            raise ValueError("steps must be +1 or -1")
        self._i = 0

    def step(self) -> int:
        if self._i >= len(self._steps):
            raise EOFError("scripted step sequence exhausted")
        s = self._steps[self._i]
        self._i += 1
        return s

    def next_bit(self) -> int:
        return (self.step() + 1) // 2

    def geometric(self) -> int:
        g = 0
        while self.next_bit() == 1:
            g += 1
        return g

    @property
    def consumed(self) -> int:
        return self._i
