"""Lotteries: probability vectors over alternatives, exact or float64.

A lottery is exact when every entry is a Fraction (ints are promoted);
any float entry makes the whole lottery float64 flavored. The solver and
the oracle-facing code only ever produce the exact flavor.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Lottery:
    probs: tuple

    def __post_init__(self):
        if len(self.probs) == 0:
            raise ValueError("a lottery needs at least one alternative")
        if any(isinstance(v, float) for v in self.probs):
            entries = tuple(float(v) for v in self.probs)
            if min(entries) < 0:
                raise ValueError(f"negative probability in {entries}")
            total = float(np.sum(np.asarray(entries)))
            if abs(total - 1.0) > FLOAT_SUM_TOL:
                raise ValueError(f"probabilities sum to {total!r}, not 1")
        else:
            entries = tuple(Fraction(v) for v in self.probs)
            if min(entries) < 0:
                raise ValueError(f"negative probability in {entries}")
            if sum(entries) != 1:
                raise ValueError(f"probabilities sum to {sum(entries)}, not 1")
        object.__setattr__(self, "probs", entries)

    @property
    def exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.probs)

    @property
    def n(self) -> int:
        return len(self.probs)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def __iter__(self):
        return iter(self.probs)

    def support(self) -> frozenset:
        return frozenset(i for i, v in enumerate(self.probs) if v > 0)

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.probs], dtype=np.float64)

    def mass(self, members) -> "Fraction | float":
        """Total probability of a set of alternatives; 0 of the right flavor."""
        zero = 0.0 if not self.exact else Fraction(0)
        return sum((self.probs[i] for i in members), zero)

    @staticmethod
    def uniform(n: int) -> "Lottery":
        return Lottery(tuple(Fraction(1, n) for _ in range(n)))

    @staticmethod
    def delta(n: int, i: int) -> "Lottery":
        if not 0 <= i < n:
            raise ValueError(f"index {i} out of range for n={n}")
        return Lottery(tuple(Fraction(1) if j == i else Fraction(0) for j in range(n)))

    @staticmethod
    def from_counts(counts) -> "Lottery":
        """Exact normalization of nonnegative integer counts."""
        total = sum(counts)
        if total <= 0:
            raise ValueError(f"counts must have a positive total, got {tuple(counts)}")
        return Lottery(tuple(Fraction(c, total) for c in counts))
