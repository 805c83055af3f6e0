"""Shared tournaments, corpora, and lottery generators for the tests."""

from fractions import Fraction

from maxlot import Lottery, Tournament, cyclone, random_tournament

THREE_CYCLE = Tournament([[0, 1, 0], [0, 0, 1], [1, 0, 0]])

# Condorcet winner 0 over the cycle 1 -> 2 -> 3 -> 1.
CONDORCET_OVER_CYCLE = Tournament([
    [0, 1, 1, 1],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [0, 1, 0, 0],
])

# Cycle 0 -> 1 -> 2 -> 0, all three beating the loser 3.
CYCLE_OVER_LOSER = Tournament([
    [0, 1, 0, 1],
    [0, 0, 1, 1],
    [1, 0, 0, 1],
    [0, 0, 0, 0],
])


def transitive(n):
    """The total order where the lower index beats the higher."""
    return Tournament([[j > i for j in range(n)] for i in range(n)])


def beats_matrix(t):
    """Plain bool rows, for handing a Tournament to the oracles."""
    return [[bool(t.beats[i][j]) for j in range(t.n)] for i in range(t.n)]


def corpus(max_n, per_n=4, seed0=900):
    """Named small tournaments plus fixed random ones of every size.

    Deterministic: the random members come from pinned seeds.
    """
    out = [t for t in (THREE_CYCLE, CONDORCET_OVER_CYCLE, CYCLE_OVER_LOSER)
           if t.n <= max_n]
    for n in range(1, max_n + 1):
        out.append(transitive(n))
        if n >= 3 and n % 2 == 1:
            out.append(cyclone(n))
        for k in range(per_n):
            out.append(random_tournament(n, seed0 + 17 * n + k))
    return out


def random_exact_lottery(n, rand, max_weight=6, positive=False):
    """Random rational lottery from small integer weights."""
    lo = 1 if positive else 0
    while True:
        weights = [rand.randint(lo, max_weight) for _ in range(n)]
        total = sum(weights)
        if total > 0:
            return Lottery(tuple(Fraction(w, total) for w in weights))
