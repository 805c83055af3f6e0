"""Log-difference sums, the urn diagnostic mu, drifts, and the error bound."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import CYCLE_OVER_LOSER, THREE_CYCLE, beats_matrix, corpus, \
    transitive
from maxlot import DiagnosticsContext, Lottery, Urn, cyclone, drift_three, \
    drift_two, epsilon, epsilon_bound, harmonic_number, harmonic_sandwich, ld, \
    ld_exact, mu, optimal_strategy, random_tournament, variance_step
from maxlot.diagnostics import inverse_square_tail


def test_ld_small_values():
    assert ld(3, 3) == 0.0
    assert ld(3, 4) == pytest.approx(-1 / 3, abs=1e-15)
    assert ld(1, 4) == pytest.approx(-(1 + 1 / 2 + 1 / 3), abs=1e-15)
    assert ld_exact(2, 5) == -(Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 4))
    with pytest.raises(ValueError):
        ld(0, 3)
    with pytest.raises(ValueError):
        ld(4, 3)


def test_ld_matches_exact_across_chunk_boundary():
    # Straddles the switch from plain fsum to chunked partial sums.
    for a, b in ((1, 70_000), (60_000, 140_000), (65_530, 65_540)):
        assert ld(a, b) == pytest.approx(float(oracles.harmonic_range(a, b)) * -1,
                                         rel=1e-13)
        assert float(ld_exact(a, b)) == pytest.approx(ld(a, b), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 500), st.integers(0, 500), st.integers(0, 500))
def test_ld_is_additive(a, d1, d2):
    b, c = a + d1, a + d1 + d2
    assert ld(a, b) + ld(b, c) == pytest.approx(ld(a, c), abs=1e-12)
    assert ld_exact(a, b) + ld_exact(b, c) == ld_exact(a, c)


def test_harmonic_sandwich_brackets():
    for k in (1, 2, 10, 100, 10_000):
        low, high = harmonic_sandwich(k)
        exact = float(oracles.harmonic_range(1, k + 1))
        assert low <= exact <= high
        assert high - low < 1 / k ** 2
        assert harmonic_number(k) == pytest.approx(exact, rel=1e-12)


def test_inverse_square_tail():
    assert inverse_square_tail(1) == pytest.approx(math.pi ** 2 / 6, rel=1e-12)
    direct = math.fsum(1 / i ** 2 for i in range(7, 100_000))
    assert inverse_square_tail(7) == pytest.approx(direct, rel=1e-4)


def _context(t):
    return DiagnosticsContext.for_tournament(t)


def test_context_validates_strategy():
    best = optimal_strategy(THREE_CYCLE)
    ctx = DiagnosticsContext(THREE_CYCLE, best)
    assert ctx.phi == pytest.approx(math.log(1 / 3), abs=1e-15)
    from maxlot import OptimalStrategy
    skew = Lottery((Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
    with pytest.raises(ValueError):
        DiagnosticsContext(THREE_CYCLE, OptimalStrategy(skew, skew.support()))


def test_mu_example():
    ctx = _context(THREE_CYCLE)
    u = Urn.fresh((2, 1, 1))
    expected = oracles.mu_exact(
        [Fraction(1, 3)] * 3, (2, 1, 1))
    assert mu(ctx, u, exact=True) == expected
    assert mu(ctx, u) == pytest.approx(float(expected), rel=1e-12)
    # Converges to phi as the urn concentrates near pstar.
    big = Urn.fresh((400, 400, 400))
    assert abs(mu(ctx, big) - ctx.phi) < 5e-3


def test_epsilon_example():
    ctx = _context(THREE_CYCLE)
    got = epsilon(ctx, Urn.fresh((2, 1, 1)), exact=True)
    assert got == (Fraction(-1, 3), Fraction(1, 3), Fraction(1, 3))
    floats = epsilon(ctx, Urn.fresh((2, 1, 1)))
    assert np.allclose(floats, [-1 / 3, 1 / 3, 1 / 3])
    # Off-support alternatives pin epsilon at -1.
    ctx4 = _context(CYCLE_OVER_LOSER)
    assert epsilon(ctx4, Urn.fresh((1, 1, 1, 1)), exact=True)[3] == -1


def test_mu_increment_is_epsilon_over_total():
    ctx = _context(THREE_CYCLE)
    pstar = list(ctx.pstar.lottery.probs)
    for counts in ((2, 1, 1), (3, 4, 2), (5, 1, 2)):
        u = Urn.fresh(counts)
        eps = epsilon(ctx, u, exact=True)
        for w in range(3):
            gain = oracles.delta_mu(pstar, counts, w)
            assert gain == eps[w] / u.total


def test_drift_examples():
    ctx = _context(THREE_CYCLE)
    u = Urn.fresh((2, 1, 1))
    assert drift_two(ctx, u, exact=True) == 0
    assert drift_three(ctx, u, exact=True) == Fraction(1, 192)
    assert drift_three(ctx, u) == pytest.approx(1 / 192, rel=1e-12)
    cond = _context(transitive(2))
    assert drift_two(cond, Urn.fresh((1, 1)), exact=True) == Fraction(1, 4)
    assert drift_three(cond, Urn.fresh((1, 1)), exact=True) == Fraction(3, 8)


def test_drifts_match_outcome_enumeration():
    for t in corpus(4, per_n=2):
        ctx = _context(t)
        beats = beats_matrix(t)
        pstar = list(ctx.pstar.lottery.probs)
        for counts in oracles.urn_grid(t.n, min(t.n + 3, 6)):
            u = Urn.fresh(counts)
            assert drift_two(ctx, u, exact=True) == \
                oracles.drift_oracle(beats, pstar, counts, 2)
            assert drift_three(ctx, u, exact=True) == \
                oracles.drift_oracle(beats, pstar, counts, 3)


def test_three_draw_drift_sign():
    for t in corpus(4, per_n=2):
        ctx = _context(t)
        pstar = ctx.pstar.lottery
        for counts in oracles.urn_grid(t.n, min(t.n + 3, 6)):
            u = Urn.fresh(counts)
            value = drift_three(ctx, u, exact=True)
            assert value >= 0
            at_pstar = u.proportions(exact=True).probs == pstar.probs
            assert (value == 0) == at_pstar


def test_variance_example_and_oracle():
    ctx = _context(THREE_CYCLE)
    assert variance_step(ctx, Urn.fresh((2, 1, 1)), exact=True) == \
        Fraction(1, 144)
    for t in corpus(4, per_n=2):
        ctx = _context(t)
        beats = beats_matrix(t)
        pstar = list(ctx.pstar.lottery.probs)
        for counts in oracles.urn_grid(t.n, min(t.n + 3, 6)):
            u = Urn.fresh(counts)
            assert variance_step(ctx, u, exact=True) == \
                oracles.variance_oracle(beats, pstar, counts)


def test_error_bound_example():
    ctx = _context(THREE_CYCLE)
    bound = epsilon_bound(ctx, Urn.fresh((2, 1, 1)))
    assert bound.lhs == pytest.approx(1 / 6, rel=1e-12)
    assert bound.rhs == pytest.approx(0.4013877113318902, rel=1e-12)
    assert bound.log_reference == pytest.approx(0.05663301226513262, rel=1e-9)
    assert bound.lhs <= bound.rhs


def test_error_bound_counterexample_is_real():
    # The quadratic error sum does NOT stay below the mu gap everywhere:
    # lopsided urns break it. Freeze one violation so the limitation of
    # this bound stays visible.
    ctx = _context(THREE_CYCLE)
    bound = epsilon_bound(ctx, Urn.fresh((1, 1, 8)))
    assert bound.lhs == pytest.approx(3.232639, abs=1e-5)
    assert bound.rhs == pytest.approx(0.866070, abs=1e-5)
    assert bound.lhs > bound.rhs
    # The log-form reference is below the quadratic sum even at the
    # near-balanced example urn, so it cannot serve as an upper bound.
    near = epsilon_bound(ctx, Urn.fresh((2, 1, 1)))
    assert near.lhs > near.log_reference


def test_error_bound_sweep():
    # Random sweep: both sides always well defined, lhs nonnegative, and
    # both orderings occur in the wild (the bound is not universal).
    rand = random.Random(17)
    holds = violations = 0
    for round_ in range(500):
        n = rand.randint(1, 6)
        ctx = _context(random_tournament(n, 10_000 + round_))
        for _ in range(20):
            counts = tuple(rand.randint(1, 9) for _ in range(n))
            bound = epsilon_bound(ctx, Urn.fresh(counts))
            assert math.isfinite(bound.lhs) and math.isfinite(bound.rhs)
            assert bound.lhs >= 0
            if bound.lhs <= bound.rhs + 1e-12:
                holds += 1
            else:
                violations += 1
    assert holds > 0 and violations > 0


def test_gap_at_start_beats_corollary_rate():
    # For tournaments whose Bipartisan set is everything, the mu gap at
    # any start exceeds 0.4 (n - 1) / total.
    for t, max_total in ((THREE_CYCLE, 64), (cyclone(5), 24)):
        ctx = _context(t)
        for counts in oracles.urn_grid(t.n, max_total):
            total = sum(counts)
            gap = ctx.phi - mu(ctx, Urn.fresh(counts))
            assert gap >= 0.4 * (t.n - 1) / total - 1e-12
    rand = random.Random(29)
    contexts = {n: _context(cyclone(n)) for n in (3, 5, 7)}
    for _ in range(300):
        n = rand.choice((3, 5, 7))
        ctx = contexts[n]
        counts = tuple(rand.randint(1, 150) for _ in range(n))
        gap = ctx.phi - mu(ctx, Urn.fresh(counts))
        assert gap >= 0.4 * (n - 1) / sum(counts) - 1e-12
