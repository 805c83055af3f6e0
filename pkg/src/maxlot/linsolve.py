"""Exact linear solving over the rationals.

Gauss-Jordan elimination on Fraction matrices, shared by the game solver
and the exact stationary-distribution path. Arbitrary-precision integers
underneath; no rounding anywhere.
"""

from fractions import Fraction


def solve_exact(rows, rhs) -> list | None:
    """Unique exact solution of a (possibly overdetermined) linear system.

    Args:
        rows: m x k coefficient rows, m >= k, any Fraction-convertible entries.
        rhs: length-m right-hand side.

    Returns:
        The unique solution as Fractions, or None when the system is
        singular, underdetermined, or inconsistent.
    """
    m, k = len(rows), len(rows[0])
    if m < k:
        return None
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])]
           for i, row in enumerate(rows)]
    rank = 0
    for col in range(k):
        pivot = next((r for r in range(rank, m) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = 1 / aug[rank][col]
        aug[rank] = [v * inv for v in aug[rank]]
        for r in range(m):
            if r != rank and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[rank])]
        rank += 1
    # leftover rows must have vanished for the solution to be consistent
    for r in range(rank, m):
        if aug[r][k] != 0:
            return None
    return [aug[i][k] for i in range(k)]
