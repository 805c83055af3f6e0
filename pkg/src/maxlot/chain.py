"""The comparison Markov chain and its closed forms.

State is the current provisional winner; each step draws a fresh
challenger from the fixed sampling lottery p and keeps the comparison
winner. p2 and p3 are the closed forms of the two- and three-draw winner
distributions; `stationary` solves for the long-run distribution, whose
support is the Top-Cycle of the restriction to support(p).
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .game import payoff_against
from .linsolve import solve_exact
from .lottery import Lottery
from .tournament import Tournament, top_cycle


@dataclass(frozen=True)
class ChainState:
    """A chain on `tournament`: sampling lottery, current distribution, index."""
    tournament: Tournament
    sampling: Lottery
    current: Lottery
    t: int = 1

    def step(self) -> "ChainState":
        nxt = chain_step(self.tournament, self.sampling, self.current)
        return ChainState(self.tournament, self.sampling, nxt, self.t + 1)

    @staticmethod
    def start(tournament: Tournament, sampling: Lottery) -> "ChainState":
        return ChainState(tournament, sampling, sampling, 1)


def chain_step(t: Tournament, p: Lottery, pt: Lottery) -> Lottery:
    """One chain step: distribution of the winner of (state, fresh p-draw).

    next(x) = pt(x) * p(T+(x) or {x}) + pt(T+(x)) * p(x).
    """
    if len(p) != t.n or len(pt) != t.n:
        raise ValueError(
            f"lottery lengths ({len(p)}, {len(pt)}) do not match n={t.n}")
    out = []
    for x in range(t.n):
        wins = t.wins_against(x)
        out.append(pt[x] * (p[x] + p.mass(wins)) + p[x] * pt.mass(wins))
    return Lottery(tuple(out))


def p2(t: Tournament, p: Lottery) -> Lottery:
    """Winner distribution of two independent p-draws: p(x) * (1 + g(x, p))."""
    return Lottery(tuple(p[x] * (1 + payoff_against(t, x, p))
                         for x in range(t.n)))


def p3(t: Tournament, p: Lottery) -> Lottery:
    """Winner distribution of three independent p-draws, closed form.

    p3(x) = p(x) * (1 + 3/2 g(x,p) + 1/2 g(x,p)^2
                    + 1/2 sum_y p(y) g(x,y) g(y,p)).

    Equals chain_step(t, p, p2(t, p)) exactly.
    """
    half = Fraction(1, 2) if p.exact else 0.5
    g = [payoff_against(t, x, p) for x in range(t.n)]
    out = []
    for x in range(t.n):
        cross = sum(p[y] * g[y] for y in t.wins_against(x))
        cross -= sum(p[y] * g[y] for y in t.loses_against(x))
        out.append(p[x] * (1 + 3 * half * g[x] + half * g[x] * g[x]
                           + half * cross))
    return Lottery(tuple(out))


def stationary(t: Tournament, p: Lottery) -> Lottery:
    """The unique stationary distribution of the chain with sampling p.

    Support is the Top-Cycle of the restriction of t to support(p); on it
    the balance condition pi(x) * p(T-(x)) = p(x) * pi(T+(x)) holds. Exact
    lotteries get an exact rational solve, float64 a numpy solve.
    """
    if len(p) != t.n:
        raise ValueError(f"lottery length {len(p)} does not match n={t.n}")
    support = p.support()
    if not support:
        raise ValueError("sampling lottery has empty support")
    states = sorted(top_cycle(t, support))
    k = len(states)
    if k == 1:
        if p.exact:
            return Lottery.delta(t.n, states[0])
        out = np.zeros(t.n)
        out[states[0]] = 1.0
        return Lottery(tuple(out))
    # From x the chain stays on a draw x beats (or x itself) and moves to
    # any y that beats x, with probability p(y); the Top-Cycle block is
    # closed because its members beat everything else in support(p).
    transition = [[None] * k for _ in range(k)]
    for a, x in enumerate(states):
        wins = t.wins_against(x)
        for b, y in enumerate(states):
            if b == a:
                transition[a][b] = p[x] + p.mass(wins)
            elif t.beats[y][x]:
                transition[a][b] = p[y]
            else:
                transition[a][b] = Fraction(0) if p.exact else 0.0
    if p.exact:
        rows = [[Fraction(1)] * k]
        for b in range(k):
            rows.append([transition[a][b] - (1 if a == b else 0)
                         for a in range(k)])
        pi = solve_exact(rows, [Fraction(1)] + [Fraction(0)] * k)
        if pi is None:
            raise AssertionError("stationary system is uniquely solvable")
        full = [Fraction(0)] * t.n
    else:
        matrix = np.array(transition, dtype=np.float64).T - np.eye(k)
        matrix[-1, :] = 1.0  # replace one redundant balance row
        rhs = np.zeros(k)
        rhs[-1] = 1.0
        pi = np.linalg.solve(matrix, rhs)
        full = [0.0] * t.n
    for b, x in enumerate(states):
        full[x] = pi[b]
    return Lottery(tuple(full))


def iterate(t: Tournament, p: Lottery, steps: int) -> list[Lottery]:
    """The sequence p^[1] .. p^[steps] (p^[1] = p)."""
    if steps < 1:
        raise ValueError(f"need at least one step, got {steps}")
    seq = [p]
    for _ in range(steps - 1):
        seq.append(chain_step(t, p, seq[-1]))
    return seq
