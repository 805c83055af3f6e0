"""The tournament game: payoff, exact optimal strategy, Bipartisan set.

The game is symmetric zero-sum with payoff +1/-1 by the beats relation
(0 on the diagonal). It has a unique optimal mixed strategy; its support
is the Bipartisan set, always of odd size and inside the Top-Cycle. The
solver is exact: rational arithmetic end to end, no rounding.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .linsolve import solve_exact
from .lottery import Lottery
from .tournament import Tournament, top_cycle

DEFAULT_EXACT_SOLVE_LIMIT = 16


class ExactSolveLimitError(ValueError):
    """Tournament too large for the exact support-enumeration solver."""

    def __init__(self, n: int, limit: int):
        super().__init__(
            f"exact solve limited to n <= {limit} alternatives, got n={n}")
        self.n = n
        self.limit = limit


@dataclass(frozen=True)
class OptimalStrategy:
    """The unique optimal lottery and its support (the Bipartisan set)."""
    lottery: Lottery
    support: frozenset


@dataclass(frozen=True)
class OptimalityReport:
    """Per-alternative residuals g(x, p) and the sign-pattern verdict.

    `ok` holds iff every supported alternative has zero residual and every
    unsupported one has a strictly negative residual.
    """
    ok: bool
    residuals: tuple
    failures: tuple


def payoff(t: Tournament, x: int, y: int) -> int:
    """g(x, y): +1 if x beats y, -1 if y beats x, 0 iff x == y."""
    if not (0 <= x < t.n and 0 <= y < t.n):
        raise IndexError(f"alternatives ({x}, {y}) out of range for n={t.n}")
    if t.beats[x][y]:
        return 1
    if t.beats[y][x]:
        return -1
    return 0


def payoff_against(t: Tournament, x: int, q: Lottery):
    """g(x, q), the payoff of pure x against lottery q."""
    if len(q) != t.n:
        raise ValueError(f"lottery length {len(q)} does not match n={t.n}")
    zero = Fraction(0) if q.exact else 0.0
    return sum((payoff(t, x, y) * q[y] for y in range(t.n) if y != x), zero)


def mixed_payoff(t: Tournament, p: Lottery, q: Lottery):
    """Bilinear extension g(p, q) = sum_x sum_y g(x, y) p(x) q(y)."""
    if len(p) != t.n or len(q) != t.n:
        raise ValueError(
            f"lottery lengths ({len(p)}, {len(q)}) do not match n={t.n}")
    zero = Fraction(0) if p.exact and q.exact else 0.0
    return sum((p[x] * payoff_against(t, x, q) for x in range(t.n)), zero)


def optimal_strategy(t: Tournament,
                     max_size: int = DEFAULT_EXACT_SOLVE_LIMIT) -> OptimalStrategy:
    """The unique optimal strategy, exactly.

    Candidate supports S inside the Top-Cycle with odd |S| are enumerated
    by increasing size, then lexicographically. For each S the square
    rational system {sum over S of p(y) g(x,y) = 0 for x in S, sum p = 1}
    is solved exactly; S is accepted iff p > 0 on S and g(x, p) < 0 for
    every x outside S. Uniqueness makes the first acceptor the answer.

    Raises:
        ExactSolveLimitError: n exceeds `max_size`.
    """
    if t.n > max_size:
        raise ExactSolveLimitError(t.n, max_size)
    cycle = sorted(top_cycle(t))
    for size in range(1, len(cycle) + 1, 2):
        for members in combinations(cycle, size):
            probs = _support_solution(t, members)
            if probs is None:
                continue
            if all(payoff_against(t, x, _embed(t.n, members, probs)) < 0
                   for x in range(t.n) if x not in members):
                lottery = _embed(t.n, members, probs)
                return OptimalStrategy(lottery=lottery,
                                       support=frozenset(members))
    raise AssertionError("every tournament has an optimal strategy")


def _support_solution(t: Tournament, members) -> list | None:
    """Positive solution of the support system on `members`, if any."""
    rows = [[Fraction(1)] * len(members)]
    rhs = [Fraction(1)] + [Fraction(0)] * len(members)
    for x in members:
        rows.append([Fraction(payoff(t, x, y)) for y in members])
    solution = solve_exact(rows, rhs)
    if solution is None or any(v <= 0 for v in solution):
        return None
    return solution


def _embed(n: int, members, probs) -> Lottery:
    full = [Fraction(0)] * n
    for x, v in zip(members, probs):
        full[x] = v
    return Lottery(tuple(full))


def verify_optimal(t: Tournament, p: Lottery) -> OptimalityReport:
    """Check the optimality sign pattern of p, with residuals.

    For an optimal strategy: p(x) > 0 implies g(x, p) = 0 and p(x) = 0
    implies g(x, p) < 0. Exact for exact lotteries; float residuals are
    compared against a 1e-9 tolerance.
    """
    residuals = tuple(payoff_against(t, x, p) for x in range(t.n))
    tol = 0 if p.exact else 1e-9
    failures = []
    for x in range(t.n):
        if p[x] > 0:
            if abs(residuals[x]) > tol:
                failures.append(x)
        elif not residuals[x] < -tol:
            failures.append(x)
    return OptimalityReport(ok=not failures, residuals=residuals,
                            failures=tuple(failures))


def bipartisan_set(t: Tournament,
                   max_size: int = DEFAULT_EXACT_SOLVE_LIMIT) -> frozenset:
    """Support of the optimal strategy."""
    return optimal_strategy(t, max_size=max_size).support
