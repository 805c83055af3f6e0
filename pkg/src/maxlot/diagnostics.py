"""Measurable quantities of urn trajectories.

The central diagnostic is mu, the optimal-strategy-weighted sum of
discrete logarithms of the ball counts. Its one-step conditional drift
under each reinforcement rule, the conditional variance of the
increment, the per-alternative relative errors epsilon, and harmonic-sum
bounds all live here. Everything is float64 by default; the rational
quantities (mu, drifts, variance, epsilon) can be computed exactly with
``exact=True`` for oracle cross-checks.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import zeta

from .chain import p2
from .game import (OptimalStrategy, mixed_payoff, optimal_strategy,
                   payoff_against, verify_optimal)
from .lottery import Lottery
from .tournament import Tournament

_CHUNK = 1 << 16


def ld(a: int, b: int) -> float:
    """Discrete logarithm: minus the harmonic sum over [a, b).

    Zero when a = b, negative otherwise. Direct summation; large ranges
    are summed in chunks whose partial sums are combined with
    compensated summation.
    """
    _check_range(a, b)
    if b - a <= _CHUNK:
        return -math.fsum(1.0 / i for i in range(a, b))
    parts = []
    for lo in range(a, b, _CHUNK):
        hi = min(lo + _CHUNK, b)
        parts.append(np.reciprocal(np.arange(lo, hi, dtype=np.float64)).sum())
    return -math.fsum(parts)


def ld_exact(a: int, b: int) -> Fraction:
    """Exact rational value of ld; intended for small ranges."""
    _check_range(a, b)
    return -sum((Fraction(1, i) for i in range(a, b)), Fraction(0))


def _check_range(a: int, b: int) -> None:
    if a <= 0:
        raise ValueError(f"lower endpoint must be positive, got {a}")
    if b < a:
        raise ValueError(f"need a <= b, got a={a}, b={b}")


def harmonic_number(k: int) -> float:
    """H_k = 1 + 1/2 + ... + 1/k (0 for k = 0)."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k == 0:
        return 0.0
    return -ld(1, k + 1)


def inverse_square_tail(m: int) -> float:
    """Sum of 1/i^2 over i >= m."""
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    return float(zeta(2, m))


def harmonic_sandwich(k: int) -> tuple[float, float]:
    """Bounds (lower, upper) with lower <= H_k <= upper.

    lower = log(k+1) + gamma - tail(k+1)/2 and upper the same with
    tail(k+2), where tail(m) sums 1/i^2 from m on.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    base = math.log(k + 1) + np.euler_gamma
    return (base - 0.5 * inverse_square_tail(k + 1),
            base - 0.5 * inverse_square_tail(k + 2))


@dataclass(frozen=True)
class DiagnosticsContext:
    """A tournament with its solved optimal strategy and the limit value phi.

    phi = sum over the Bipartisan set of pstar(x) * log pstar(x), the
    value mu approaches when ball proportions converge to pstar.
    """
    tournament: Tournament
    pstar: OptimalStrategy
    phi: float = field(init=False)

    def __post_init__(self):
        report = verify_optimal(self.tournament, self.pstar.lottery)
        if not report.ok:
            raise ValueError(
                f"strategy fails optimality at alternatives {report.failures}")
        phi = math.fsum(float(q) * math.log(float(q))
                        for q in self.pstar.lottery if q > 0)
        object.__setattr__(self, "phi", phi)

    @staticmethod
    def for_tournament(t: Tournament, max_size: int | None = None
                       ) -> "DiagnosticsContext":
        kwargs = {} if max_size is None else {"max_size": max_size}
        return DiagnosticsContext(t, optimal_strategy(t, **kwargs))

    @property
    def n(self) -> int:
        return self.tournament.n

    def pstar_floats(self) -> tuple[float, ...]:
        return self.pstar.lottery.as_floats()


def _check_urn(ctx: DiagnosticsContext, counts) -> None:
    if len(counts) != ctx.n:
        raise ValueError(
            f"urn has {len(counts)} colors, tournament has {ctx.n}")


def mu(ctx: DiagnosticsContext, u, exact: bool = False):
    """pstar-weighted sum of ld(count(x), total); always <= 0."""
    _check_urn(ctx, u.counts)
    total = u.total
    if exact:
        p = ctx.pstar.lottery
        return sum((p[x] * ld_exact(u.counts[x], total)
                    for x in range(ctx.n)), Fraction(0))
    p = ctx.pstar_floats()
    return math.fsum(p[x] * ld(u.counts[x], total)
                     for x in range(ctx.n) if p[x] > 0.0)


def epsilon(ctx: DiagnosticsContext, u, exact: bool = False) -> tuple:
    """Relative errors pstar(x) / ntilde(x) - 1; equals -1 where pstar is 0."""
    _check_urn(ctx, u.counts)
    total = u.total
    if exact:
        p = ctx.pstar.lottery
        return tuple(p[x] * total / u.counts[x] - 1 for x in range(ctx.n))
    p = ctx.pstar_floats()
    return tuple(p[x] * total / u.counts[x] - 1.0 for x in range(ctx.n))


def drift_two(ctx: DiagnosticsContext, u, exact: bool = False):
    """Expected one-step mu increment under two-draw reinforcement.

    Equals g(pstar, ntilde) / total; nonnegative because pstar guarantees
    nonnegative payoff against every lottery.
    """
    _check_urn(ctx, u.counts)
    nt = u.proportions(exact=exact)
    p = ctx.pstar.lottery if exact else Lottery(ctx.pstar_floats())
    return mixed_payoff(ctx.tournament, p, nt) / u.total


def drift_three(ctx: DiagnosticsContext, u, exact: bool = False):
    """Expected one-step mu increment under three-draw reinforcement.

    (1/total) * (3/2 g(p*, q) + 1/2 sum_w p*(w) g(w, q)^2
                 + 1/2 sum_v q(v) g(p*, v) g(v, q))
    with q = ntilde. Nonnegative, zero only at q = p*.
    """
    _check_urn(ctx, u.counts)
    t = ctx.tournament
    nt = u.proportions(exact=exact)
    p = ctx.pstar.lottery if exact else Lottery(ctx.pstar_floats())
    half = Fraction(1, 2) if exact else 0.5
    g_q = [payoff_against(t, v, nt) for v in range(t.n)]
    g_p = [payoff_against(t, v, p) for v in range(t.n)]
    first = 3 * half * sum(p[w] * g_q[w] for w in range(t.n))
    second = half * sum(p[w] * g_q[w] * g_q[w] for w in range(t.n))
    third = half * sum(nt[v] * (-g_p[v]) * g_q[v] for v in range(t.n))
    return (first + second + third) / u.total


def variance_step(ctx: DiagnosticsContext, u, exact: bool = False):
    """Conditional second moment of the mu increment, two-draw rule.

    (1/total^2) * sum over ALL x of ntilde2(x) * epsilon(x)^2, where
    ntilde2 is the two-draw winner distribution of the proportions. The
    sum runs over every alternative, including those outside the
    Bipartisan set (where epsilon is -1).
    """
    _check_urn(ctx, u.counts)
    nt = u.proportions(exact=exact)
    nt2 = p2(ctx.tournament, nt)
    eps = epsilon(ctx, u, exact=exact)
    total_sq = u.total * u.total
    if exact:
        return sum((nt2[x] * eps[x] * eps[x] for x in range(ctx.n)),
                   Fraction(0)) / total_sq
    return math.fsum(nt2[x] * eps[x] * eps[x]
                     for x in range(ctx.n)) / total_sq


class EpsilonBound(NamedTuple):
    """Both sides of the concentration inequality lhs <= rhs.

    lhs sums (ntilde(x) + pstar(x)/2) * epsilon(x)^2 over the Bipartisan
    set; rhs is phi - mu. log_reference is phi minus the pstar-weighted
    log of the proportions, reported for comparison only: the inequality
    is not asserted against it (it fails already at a 3-cycle urn
    (2,1,1), where lhs = 1/6 exceeds it).
    """
    lhs: float
    rhs: float
    log_reference: float


def epsilon_bound(ctx: DiagnosticsContext, u) -> EpsilonBound:
    _check_urn(ctx, u.counts)
    total = u.total
    p = ctx.pstar_floats()
    eps = epsilon(ctx, u)
    lhs = math.fsum((u.counts[x] / total + p[x] / 2.0) * eps[x] * eps[x]
                    for x in ctx.pstar.support)
    rhs = ctx.phi - mu(ctx, u)
    log_ref = ctx.phi - math.fsum(
        p[x] * math.log(u.counts[x] / total) for x in ctx.pstar.support)
    return EpsilonBound(lhs, rhs, log_ref)
