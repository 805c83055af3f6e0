"""Deterministic random streams for all stochastic code in this package.

The generator is pinned precisely so that trajectories are reproducible
across machines, across serial/parallel execution, and across independent
implementations:

- Raw words: numpy's Philox-4x64-10 counter-based bit generator, 128-bit key,
  counter starting at 0, successive 64-bit outputs taken in order
  (``BitGenerator.random_raw``).
- Streams: stream ``k`` of master seed ``m`` uses key ``(m mod 2^64, k mod 2^64)``
  as the two 64-bit key words. Distinct (seed, stream) pairs give independent
  streams by construction of the keyed cipher.
- Bounded integers in [0, b): rejection sampling. With ``threshold = 2^64 mod b``,
  draw raw words until one satisfies ``r >= threshold`` and return ``r mod b``.
  The accepted region has size divisible by b, so the result is exactly uniform
  (no modulo bias).
- Unit doubles in [0, 1): ``(r >> 11) * 2^-53`` from a single raw word.

Consumers must consume words strictly in order; buffering below never skips
or reorders words, so chunk sizes cannot affect results.
"""

import numpy as np

MASK64 = (1 << 64) - 1

# Stream index reserved for tournament generation, outside the range of
# ensemble trajectory streams (which are small nonnegative integers).
TOURNAMENT_STREAM = 1 << 63

_BLOCK = 1 << 16


def philox_key(master_seed: int, stream: int) -> np.ndarray:
    """The 128-bit Philox key for a (seed, stream) pair, as two uint64 words."""
    return np.array([master_seed & MASK64, stream & MASK64], dtype=np.uint64)


class RawStream:
    """Buffered sequential reader of one Philox raw-word stream."""

    def __init__(self, master_seed: int, stream: int = 0, block: int = _BLOCK):
        self.master_seed = master_seed & MASK64
        self.stream = stream & MASK64
        self._bitgen = np.random.Philox(key=philox_key(master_seed, stream))
        self._block = block
        self._buf = np.empty(0, dtype=np.uint64)
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        """The next n raw words, consumed from the stream."""
        out = np.empty(n, dtype=np.uint64)
        filled = 0
        while filled < n:
            if self._pos == self._buf.size:
                self._buf = self._bitgen.random_raw(max(self._block, n - filled))
                self._pos = 0
            m = min(n - filled, self._buf.size - self._pos)
            out[filled:filled + m] = self._buf[self._pos:self._pos + m]
            self._pos += m
            filled += m
        return out

    def next_raw(self) -> int:
        if self._pos == self._buf.size:
            self._buf = self._bitgen.random_raw(self._block)
            self._pos = 0
        value = int(self._buf[self._pos])
        self._pos += 1
        return value

    def bounded(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        threshold = (1 << 64) % bound
        while True:
            r = self.next_raw()
            if r >= threshold:
                return r % bound

    def unit(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_raw() >> 11) * 2.0 ** -53
